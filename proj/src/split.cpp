#include "mtasc/split.hpp"

#include <algorithm>
#include <stdexcept>

namespace mtasc {

MixedSplit MixedSplit::from_hk(Eigen::Index dof, const std::vector<Eigen::Index>& hk_indices) {
  MixedSplit s;
  s.hk = hk_indices;
  std::sort(s.hk.begin(), s.hk.end());
  for (Eigen::Index i = 0; i < dof; ++i) {
    if (!std::binary_search(s.hk.begin(), s.hk.end(), i)) s.tg.push_back(i);
  }
  s.validate(dof);
  return s;
}

MixedSplit MixedSplit::all_hk(Eigen::Index dof) {
  MixedSplit s;
  for (Eigen::Index i = 0; i < dof; ++i) s.hk.push_back(i);
  return s;
}

void MixedSplit::validate(Eigen::Index dof) const {
  std::vector<char> seen(static_cast<std::size_t>(std::max<Eigen::Index>(dof, 0)), 0);
  auto mark = [&](Eigen::Index i) {
    if (i < 0 || i >= dof) throw std::invalid_argument("MixedSplit: index out of range");
    if (seen[static_cast<std::size_t>(i)]++) throw std::invalid_argument("MixedSplit: index listed twice");
  };
  for (auto i : hk) mark(i);
  for (auto i : tg) mark(i);
  if (hk_count() + tg_count() != dof) throw std::invalid_argument("MixedSplit: split does not cover all DOFs");
}

}  // namespace mtasc
