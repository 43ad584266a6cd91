/* Copyright 2026 The BECR Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BECR_WAV_HPP_
#define BECR_WAV_HPP_

#include <string>

#include "becr/audio.hpp"

namespace becr {

// Reads a RIFF/WAVE file: PCM 16-bit little-endian or IEEE float32, 1 or 2
// channels, any sample rate. Stereo is downmixed by channel average; 16-bit
// samples are scaled by 1/32768. Other codecs/bit depths/channel counts
// raise UnsupportedFormatError; structural damage raises ParseError.
AudioBuffer load_wav(const std::string& path);

}  // namespace becr

#endif  // BECR_WAV_HPP_
