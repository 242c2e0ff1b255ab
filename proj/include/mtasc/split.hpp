#ifndef MTASC_SPLIT_HPP
#define MTASC_SPLIT_HPP

#include <vector>

#include <Eigen/Core>

namespace mtasc {

/// Partition of the F degrees of freedom into Herman-Kluk (sampled) and
/// thawed-Gaussian (analytically integrated) sets.
struct MixedSplit {
  std::vector<Eigen::Index> hk;
  std::vector<Eigen::Index> tg;

  /// Puts the listed DOFs in the HK set and every other DOF in the TG set.
  static MixedSplit from_hk(Eigen::Index dof, const std::vector<Eigen::Index>& hk_indices);
  static MixedSplit all_hk(Eigen::Index dof);

  Eigen::Index hk_count() const { return static_cast<Eigen::Index>(hk.size()); }
  Eigen::Index tg_count() const { return static_cast<Eigen::Index>(tg.size()); }
  Eigen::Index dof() const { return hk_count() + tg_count(); }

  /// Throws std::invalid_argument unless hk and tg are disjoint and cover 0..dof-1.
  void validate(Eigen::Index dof) const;
};

}  // namespace mtasc

#endif  // MTASC_SPLIT_HPP
