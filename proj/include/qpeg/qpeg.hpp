// Copyright (c) the qpeg project authors
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
//
// Umbrella header for the qpeg tensor-network image codec.

#pragma once

#include "qpeg/als.hpp"
#include "qpeg/codec.hpp"
#include "qpeg/container.hpp"
#include "qpeg/dct.hpp"
#include "qpeg/error.hpp"
#include "qpeg/image.hpp"
#include "qpeg/mps.hpp"
#include "qpeg/rg_map.hpp"

namespace qpeg {}
