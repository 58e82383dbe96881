#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace tgf {

using WaveVector = std::array<int, 3>;

/// Truncated Fourier mode set on the periodic box [0, 2*pi)^dim.
///
/// Fields keep every wave vector with |k_i| <= dealias_cut on each axis,
/// dealias_cut = floor(2 n_max / 3). Products are evaluated on a collocation
/// grid with quad_points > 4 * dealias_cut nodes per axis. At that size a
/// cubic product of retained fields, paired with a fourth retained field,
/// integrates without aliasing, so the discrete identities hold to round-off.
class WaveGrid {
 public:
  WaveGrid() = default;
  WaveGrid(int dim, int n_max);

  int dim() const { return dim_; }
  int n_max() const { return n_max_; }
  int dealias_cut() const { return cut_; }
  int side() const { return 2 * cut_ + 1; }
  int quad_points() const { return quad_; }
  std::size_t grid_size() const { return grid_size_; }
  std::size_t mode_count() const { return modes_; }

  const WaveVector& wave_vector(std::size_t m) const { return table_->k[m]; }
  double k2(std::size_t m) const { return table_->k2[m]; }
  // Index of -k. Digits of the mode index flip as d -> side-1-d.
  std::size_t mirror(std::size_t m) const { return modes_ - 1 - m; }
  std::size_t zero_mode() const { return modes_ / 2; }
  bool contains(const WaveVector& k) const;
  std::size_t index_of(const WaveVector& k) const;

  // (2 pi)^dim, the box volume.
  double volume() const { return volume_; }
  // Quadrature weight of one collocation node.
  double node_weight() const { return volume_ / static_cast<double>(grid_size_); }

  // Position of mode m in the r2c half spectrum. Modes with a negative last
  // component are read through their mirror (conj flag set).
  std::size_t half_position(std::size_t m) const { return table_->half_pos[m]; }
  bool half_conj(std::size_t m) const { return table_->half_conj[m]; }
  std::size_t half_size() const { return half_size_; }

  bool operator==(const WaveGrid& o) const { return dim_ == o.dim_ && n_max_ == o.n_max_; }
  bool valid() const { return table_ != nullptr; }

  // Smallest even size >= min_points with no prime factor above 5.
  static int fft_friendly(int min_points);

 private:
  struct Table {
    std::vector<WaveVector> k;
    std::vector<double> k2;
    std::vector<std::size_t> half_pos;
    std::vector<bool> half_conj;
  };
  int dim_ = 0;
  int n_max_ = 0;
  int cut_ = 0;
  int quad_ = 0;
  std::size_t modes_ = 0;
  std::size_t grid_size_ = 0;
  std::size_t half_size_ = 0;
  double volume_ = 0.0;
  std::shared_ptr<const Table> table_;
};

}  // namespace tgf
