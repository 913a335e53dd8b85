// Copyright 2026 The Pretouch Authors
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

#include "pretouch/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pretouch {

int available_threads() {
#ifdef _OPENMP
  const int max = omp_get_max_threads();
  const int lim = omp_get_thread_limit();
  return max < lim ? max : lim;
#else
  return 1;
#endif
}

bool has_openmp_support() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace pretouch
