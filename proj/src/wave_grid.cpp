#include "tgf/wave_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tgf {

int WaveGrid::fft_friendly(int min_points) {
  for (int n = min_points + (min_points % 2);; n += 2) {
    int r = n;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return n;
  }
}

WaveGrid::WaveGrid(int dim, int n_max) : dim_(dim), n_max_(n_max) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dim must be 2 or 3, got " + std::to_string(dim));
  cut_ = (2 * n_max) / 3;
  // n_max = 1 leaves no retained mode under the 2/3 rule.
  if (n_max < 2) throw std::invalid_argument("n_max must be >= 2 so that at least one mode survives dealiasing");
  quad_ = fft_friendly(4 * cut_ + 2);
  const std::size_t s = static_cast<std::size_t>(side());
  const std::size_t q = static_cast<std::size_t>(quad_);
  modes_ = dim == 2 ? s * s : s * s * s;
  grid_size_ = dim == 2 ? q * q : q * q * q;
  half_size_ = grid_size_ / q * (q / 2 + 1);
  volume_ = std::pow(2.0 * std::numbers::pi, dim);

  auto t = std::make_shared<Table>();
  t->k.resize(modes_);
  t->k2.resize(modes_);
  t->half_pos.resize(modes_);
  t->half_conj.resize(modes_);
  const int c = cut_;
  auto wrap = [q](int k) { return static_cast<std::size_t>((k + static_cast<int>(q)) % static_cast<int>(q)); };
  const std::size_t hq = q / 2 + 1;
  for (std::size_t m = 0; m < modes_; ++m) {
    WaveVector k{0, 0, 0};
    std::size_t r = m;
    for (int a = dim - 1; a >= 0; --a) {
      k[a] = static_cast<int>(r % s) - c;
      r /= s;
    }
    t->k[m] = k;
    t->k2[m] = double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    const int last = dim - 1;
    WaveVector h = k;
    bool conj = false;
    if (k[last] < 0) {
      for (int a = 0; a < dim; ++a) h[a] = -k[a];
      conj = true;
    }
    std::size_t pos = 0;
    for (int a = 0; a < last; ++a) pos = pos * q + wrap(h[a]);
    pos = pos * hq + static_cast<std::size_t>(h[last]);
    t->half_pos[m] = pos;
    t->half_conj[m] = conj;
  }
  table_ = std::move(t);
}

bool WaveGrid::contains(const WaveVector& k) const {
  for (int a = 0; a < 3; ++a) {
    const int lim = a < dim_ ? cut_ : 0;
    if (k[a] < -lim || k[a] > lim) return false;
  }
  return true;
}

std::size_t WaveGrid::index_of(const WaveVector& k) const {
  if (!contains(k)) throw std::out_of_range("wave vector outside the retained set");
  std::size_t m = 0;
  for (int a = 0; a < dim_; ++a) m = m * static_cast<std::size_t>(side()) + static_cast<std::size_t>(k[a] + cut_);
  return m;
}

}  // namespace tgf
