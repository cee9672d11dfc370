// SPDX-License-Identifier: Apache-2.0
//
// csisense - Wi-Fi channel state information sensing toolkit
// Copyright (C) 2026 The csisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "csisense/denoise.hpp"

namespace csisense {

StreamMatrix remove_background(const StreamMatrix& m, const SvdMode& mode) {
  StreamMatrix out = m;
  if (mode.scope == SvdScope::Stacked120) {
    out.values = remove_top_components(m.values, mode.removed_components);
    return out;
  }
  for (Index pair : m.pairs()) {
    std::vector<Index> cols;
    for (std::size_t c = 0; c < m.stream_map.size(); ++c) {
      if (m.stream_map[c].pair == pair) cols.push_back(static_cast<Index>(c));
    }
    Eigen::MatrixXd block(m.samples(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) block.col(static_cast<Index>(j)) = m.values.col(cols[j]);
    const Eigen::MatrixXd cleaned = remove_top_components(block, mode.removed_components);
    for (std::size_t j = 0; j < cols.size(); ++j) out.values.col(cols[j]) = cleaned.col(static_cast<Index>(j));
  }
  return out;
}

} // namespace csisense
