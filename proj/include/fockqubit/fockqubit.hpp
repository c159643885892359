// Copyright 2026 The fockqubit Authors
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

// Umbrella header for the numerical core. The pipeline runner lives in
// fockqubit/pipeline.hpp and carries extra link dependencies.

#include "fockqubit/analysis.hpp"
#include "fockqubit/channels.hpp"
#include "fockqubit/error.hpp"
#include "fockqubit/fock_core.hpp"
#include "fockqubit/homodyne.hpp"
#include "fockqubit/source_model.hpp"
#include "fockqubit/tomography.hpp"
#include "fockqubit/version.hpp"
