// Copyright 2026 The Exdec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXDEC_EXDEC_HPP_
#define EXDEC_EXDEC_HPP_

#include "exdec/analysis.hpp"
#include "exdec/cli.hpp"
#include "exdec/core.hpp"
#include "exdec/model.hpp"
#include "exdec/search.hpp"

#endif  // EXDEC_EXDEC_HPP_
