// Copyright 2026 The hdrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Regenerates the golden container fixtures:
//   hdrc_make_fixtures <output dir>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hdrc/bitstream.h"
#include "hdrc/checkpoint.h"
#include "hdrc/codec.h"
#include "hdrc/dataset.h"
#include "hdrc/golden.h"
#include "hdrc/hdr_io.h"
#include "json.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: hdrc_make_fixtures <output dir>\n";
    return 1;
  }
  try {
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    const hdrc::Model model(hdrc::golden_network_config(), hdrc::kGoldenSeed);
    hdrc::save_checkpoint((dir / hdrc::kGoldenCheckpoint).string(), model,
                          nlohmann::json::object());
    hdrc::write_radiance_hdr_file(
        dir / hdrc::kGoldenImage,
        hdrc::synthetic_scene(hdrc::kGoldenSeed, hdrc::kGoldenSize,
                              hdrc::kGoldenSize));
    const hdrc::HdrImage s =
        hdrc::read_radiance_hdr_file(dir / hdrc::kGoldenImage);
    const hdrc::Bitstream b = hdrc::compress(s, model, hdrc::kGoldenLmax);
    hdrc::write_file_bytes((dir / hdrc::kGoldenBitstream).string(),
                           hdrc::serialize_bitstream(b));
    const hdrc::DecodedImage d = hdrc::decompress(b, model);
    const nlohmann::json expected = {
        {"ldr_fnv64", hdrc::pixel_digest(d.ldr.pixels)},
        {"hdr_fnv64", hdrc::pixel_digest(d.hdr.pixels)}};
    std::ofstream(dir / hdrc::kGoldenDigest) << expected.dump(2) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
