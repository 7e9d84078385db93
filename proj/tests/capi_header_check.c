/*
 * Copyright 2026 The vgskit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Compiled as C99 so the public header stays usable from plain C. */

#include "vgskit/vgskit.h"

int vgs_c_header_roundtrip(void) {
  static const float values[6] = {1, 2, 3, 4, 5, 6};
  vgs_matrix* m = NULL;
  vgs_mask_spec spec = vgs_default_mask_spec();
  uint8_t flags[4];
  int ok = 1;
  if (vgs_matrix_create(2, 3, values, &m) != VGS_OK) return 0;
  ok = ok && vgs_matrix_rows(m) == 2 && vgs_matrix_data(m)[5] == 6.0f;
  vgs_matrix_free(m);
  spec.p = 1.0;
  spec.span_len = 1;
  ok = ok && vgs_sample_mask(4, &spec, flags) == VGS_OK && flags[3] == 1;
  return ok;
}
