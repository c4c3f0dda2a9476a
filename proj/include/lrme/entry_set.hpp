#pragma once

#include <lrme/types.hpp>

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace lrme {

using Index = Eigen::Index;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A set of (row, col) positions of an n_rows x n_cols matrix.
///
/// Stored as a dense boolean mask, so membership and the set algebra are
/// O(1) and O(n_rows * n_cols) respectively, and projections onto the set are
/// a single masked select.
class EntrySet {
 public:
  EntrySet() = default;
  EntrySet(Index rows, Index cols);  // empty set
  explicit EntrySet(Mask mask);

  static EntrySet empty(Index rows, Index cols) { return EntrySet(rows, cols); }
  static EntrySet full(Index rows, Index cols);
  // Throws ArgumentError on out-of-range or duplicate pairs.
  static EntrySet from_indices(Index rows, Index cols,
                               const std::vector<std::pair<Index, Index>>& indices);

  Index rows() const { return mask_.rows(); }
  Index cols() const { return mask_.cols(); }
  std::size_t size() const { return static_cast<std::size_t>(mask_.count()); }
  bool is_empty() const { return size() == 0; }

  bool contains(Index i, Index j) const;
  void insert(Index i, Index j);
  void erase(Index i, Index j);

  EntrySet complement() const;
  EntrySet operator|(const EntrySet& other) const;  // union
  EntrySet operator&(const EntrySet& other) const;  // intersection
  EntrySet operator-(const EntrySet& other) const;  // difference
  bool operator==(const EntrySet& other) const;

  Eigen::VectorXi row_counts() const;
  Eigen::VectorXi col_counts() const;
  // Largest number of members in any single row or column.
  int max_line_count() const;

  // Members in row-major order.
  std::vector<std::pair<Index, Index>> indices() const;

  const Mask& mask() const { return mask_; }

 private:
  void check_shape(const EntrySet& other, const char* where) const;
  void check_index(Index i, Index j, const char* where) const;

  Mask mask_;
};

/// Zero every entry of `m` outside `set`.
template <typename Derived>
Matrix<typename Derived::Scalar> project_entries(const Eigen::MatrixBase<Derived>& m,
                                                 const EntrySet& set) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != set.rows() || m.cols() != set.cols()) {
    throw DimensionError("project_entries: matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", entry set indexes " +
                         std::to_string(set.rows()) + "x" + std::to_string(set.cols()));
  }
  return set.mask().select(m.derived().array(), Scalar(0)).matrix();
}

/// Exact support of `m` (entries that are not identically zero).
template <typename Derived>
EntrySet support(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return EntrySet(Mask(m.derived().array() != Scalar(0)));
}

}  // namespace lrme
