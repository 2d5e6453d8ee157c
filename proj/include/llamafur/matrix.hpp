#pragma once

#include <span>
#include <string>
#include <vector>

#include "llamafur/types.hpp"

namespace llamafur {

/// Dense square category-category weight matrix W, row-major doubles.
/// Training accumulates in 64-bit; files may store 32-bit on request.
class CategoryMatrix {
 public:
  CategoryMatrix() = default;
  explicit CategoryMatrix(cat_id dim)
      : dim_(dim),
        weights_(static_cast<std::size_t>(dim) * dim, 0.0) {}

  cat_id dim() const { return dim_; }

  double at(cat_id c, cat_id cp) const {
    check(c), check(cp);
    return weights_[static_cast<std::size_t>(c) * dim_ + cp];
  }
  double& at(cat_id c, cat_id cp) {
    check(c), check(cp);
    return weights_[static_cast<std::size_t>(c) * dim_ + cp];
  }

  std::span<const double> row(cat_id c) const {
    check(c);
    return {weights_.data() + static_cast<std::size_t>(c) * dim_, dim_};
  }
  std::span<const double> data() const { return weights_; }

  // Σ_{c ∈ rows} Σ_{c' ∈ cols} w_{c,c'}; the Eq-style pair score kernel.
  double block_sum(std::span<const cat_id> rows,
                   std::span<const cat_id> cols) const;
  void add_to_block(std::span<const cat_id> rows, std::span<const cat_id> cols,
                    double delta);

  bool all_finite() const;

  bool operator==(const CategoryMatrix&) const = default;

 private:
  void check(cat_id c) const;

  cat_id dim_ = 0;
  std::vector<double> weights_;
};

// Header (magic, version, dim, element width) + row-major little-endian
// payload. element_width 8 keeps doubles bit-exact; 4 stores floats.
void save_matrix(const CategoryMatrix& w, const std::string& path,
                 unsigned element_width = 8);
CategoryMatrix load_matrix(const std::string& path);

}  // namespace llamafur
