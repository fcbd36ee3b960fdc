// Copyright 2026 The kdcs Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kdcs/colormap.hpp"
#include "kdcs/kde.hpp"

namespace kdcs {

// Raster export: `<stem>.f32` holds width*height little-endian float32
// values, row 0 = southernmost row; `<stem>.hdr` is a key=value sidecar:
//
//   format=kdcs-raster
//   version=1
//   width=256
//   height=256
//   min_x=0 min_y=0 max_x=1 max_y=1     (one key per line)
//   bandwidth=0.02
//   source_size=100000
//   dtype=float32
//   byte_order=little
//   row_order=south_up
void write_raster(const DensityRaster& raster, const std::filesystem::path& stem);
DensityRaster read_raster(const std::filesystem::path& stem);

// Little-endian float32 encoding of a value grid (the HTTP body format).
std::string encode_float32(const std::vector<double>& values);
std::vector<float> decode_float32(const std::string& bytes);

void write_png(const Image& image, const std::filesystem::path& path);
Image read_png(const std::filesystem::path& path);

}  // namespace kdcs
