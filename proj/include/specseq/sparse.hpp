#pragma once

#include "field.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace specseq {

using index_t = int;

/// Column-sparse matrix over GF(p).  Columns hold (row, coeff) pairs sorted
/// by row; no stored coefficient is zero.  Instances are values: every
/// operation returns a new matrix, mutation happens only inside builders.
class sparse_matrix {
  public:
    struct entry {
        index_t row;
        index_t col;
        std::uint32_t coeff;
        bool operator==(const entry&) const = default;
    };

    sparse_matrix() : field_(2), rows_(0), cols_(0) {}

    sparse_matrix(fp_field f, index_t rows, index_t cols)
        : field_(f), rows_(rows), cols_(cols), col_data_(static_cast<std::size_t>(cols)) {
        if (rows < 0 || cols < 0) throw error("negative matrix dimension");
    }

    static sparse_matrix from_entries(fp_field f, index_t rows, index_t cols,
                                      const std::vector<entry>& es) {
        sparse_matrix m(f, rows, cols);
        for (const auto& e : es) m.add_at(e.row, e.col, e.coeff);
        m.normalize();
        return m;
    }

    static sparse_matrix identity(fp_field f, index_t n) {
        sparse_matrix m(f, n, n);
        for (index_t i = 0; i < n; ++i) m.col_data_[i].push_back({i, 1});
        return m;
    }

    const fp_field& field() const { return field_; }
    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    std::uint32_t at(index_t r, index_t c) const {
        check_index(r, c);
        for (const auto& [row, v] : col_data_[c])
            if (row == r) return v;
        return 0;
    }

    const std::vector<std::pair<index_t, std::uint32_t>>& column(index_t c) const {
        return col_data_[static_cast<std::size_t>(c)];
    }

    std::size_t nnz() const {
        std::size_t n = 0;
        for (const auto& c : col_data_) n += c.size();
        return n;
    }

    bool is_zero() const { return nnz() == 0; }

    bool operator==(const sparse_matrix& o) const {
        return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ &&
               col_data_ == o.col_data_;
    }

    /// Entries sorted column-major (the serialization order).
    std::vector<entry> entries() const {
        std::vector<entry> es;
        es.reserve(nnz());
        for (index_t c = 0; c < cols_; ++c)
            for (const auto& [r, v] : col_data_[c]) es.push_back({r, c, v});
        return es;
    }

    sparse_matrix transpose() const {
        sparse_matrix t(field_, cols_, rows_);
        for (index_t c = 0; c < cols_; ++c)
            for (const auto& [r, v] : col_data_[c]) t.col_data_[r].push_back({c, v});
        // columns of t were filled in increasing row order already
        return t;
    }

    sparse_matrix scaled(std::uint32_t s) const {
        sparse_matrix m(field_, rows_, cols_);
        if (s == 0) return m;
        for (index_t c = 0; c < cols_; ++c)
            for (const auto& [r, v] : col_data_[c]) m.col_data_[c].push_back({r, field_.mul(v, s)});
        return m;
    }

    sparse_matrix negated() const { return scaled(field_.neg(1)); }

    friend sparse_matrix operator+(const sparse_matrix& a, const sparse_matrix& b) {
        if (a.field_ != b.field_) throw error("field mismatch in matrix sum");
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw error("dimension mismatch in matrix sum");
        sparse_matrix m(a.field_, a.rows_, a.cols_);
        for (index_t c = 0; c < a.cols_; ++c) {
            const auto& ca = a.col_data_[c];
            const auto& cb = b.col_data_[c];
            auto& out = m.col_data_[c];
            std::size_t i = 0, j = 0;
            while (i < ca.size() || j < cb.size()) {
                if (j == cb.size() || (i < ca.size() && ca[i].first < cb[j].first)) {
                    out.push_back(ca[i++]);
                } else if (i == ca.size() || cb[j].first < ca[i].first) {
                    out.push_back(cb[j++]);
                } else {
                    std::uint32_t v = a.field_.add(ca[i].second, cb[j].second);
                    if (v != 0) out.push_back({ca[i].first, v});
                    ++i, ++j;
                }
            }
        }
        return m;
    }

    friend sparse_matrix operator-(const sparse_matrix& a, const sparse_matrix& b) {
        return a + b.negated();
    }

    friend sparse_matrix operator*(const sparse_matrix& a, const sparse_matrix& b) {
        if (a.field_ != b.field_) throw error("field mismatch in matrix product");
        if (a.cols_ != b.rows_) throw error("dimension mismatch in matrix product");
        sparse_matrix m(a.field_, a.rows_, b.cols_);
        std::vector<std::uint32_t> acc(static_cast<std::size_t>(a.rows_), 0);
        std::vector<index_t> touched;
        for (index_t c = 0; c < b.cols_; ++c) {
            touched.clear();
            for (const auto& [mid, bv] : b.col_data_[c]) {
                for (const auto& [r, av] : a.col_data_[mid]) {
                    if (acc[r] == 0 && !std::binary_search(touched.begin(), touched.end(), r)) {
                        touched.insert(std::lower_bound(touched.begin(), touched.end(), r), r);
                    }
                    acc[r] = a.field_.add(acc[r], a.field_.mul(av, bv));
                }
            }
            auto& out = m.col_data_[c];
            for (index_t r : touched) {
                if (acc[r] != 0) out.push_back({r, acc[r]});
                acc[r] = 0;
            }
        }
        return m;
    }

    /// Submatrix given by explicit row/column index lists (in the given order).
    sparse_matrix select(const std::vector<index_t>& row_ids,
                         const std::vector<index_t>& col_ids) const {
        std::vector<index_t> row_pos(static_cast<std::size_t>(rows_), -1);
        for (std::size_t i = 0; i < row_ids.size(); ++i) row_pos[row_ids[i]] = static_cast<index_t>(i);
        sparse_matrix m(field_, static_cast<index_t>(row_ids.size()),
                        static_cast<index_t>(col_ids.size()));
        for (std::size_t j = 0; j < col_ids.size(); ++j) {
            for (const auto& [r, v] : col_data_[col_ids[j]])
                if (row_pos[r] >= 0) m.col_data_[j].push_back({row_pos[r], v});
            std::sort(m.col_data_[j].begin(), m.col_data_[j].end());
        }
        return m;
    }

    /// Columns of `b` appended to the right of `a`.
    friend sparse_matrix hconcat(const sparse_matrix& a, const sparse_matrix& b) {
        if (a.field_ != b.field_ || a.rows_ != b.rows_) throw error("hconcat mismatch");
        sparse_matrix m(a.field_, a.rows_, a.cols_ + b.cols_);
        for (index_t c = 0; c < a.cols_; ++c) m.col_data_[c] = a.col_data_[c];
        for (index_t c = 0; c < b.cols_; ++c) m.col_data_[a.cols_ + c] = b.col_data_[c];
        return m;
    }

  private:
    void check_index(index_t r, index_t c) const {
        if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw error("matrix index out of range");
    }

    void add_at(index_t r, index_t c, std::uint32_t v) {
        check_index(r, c);
        col_data_[c].push_back({r, field_.reduce(static_cast<std::int64_t>(v))});
    }

    void normalize() {
        for (auto& col : col_data_) {
            std::sort(col.begin(), col.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            std::vector<std::pair<index_t, std::uint32_t>> merged;
            for (const auto& [r, v] : col) {
                if (!merged.empty() && merged.back().first == r)
                    merged.back().second = field_.add(merged.back().second, v);
                else
                    merged.push_back({r, v});
            }
            std::erase_if(merged, [](const auto& e) { return e.second == 0; });
            col = std::move(merged);
        }
    }

    friend class matrix_builder;

    fp_field field_;
    index_t rows_, cols_;
    std::vector<std::vector<std::pair<index_t, std::uint32_t>>> col_data_;
};

/// Accumulating builder; the one place where entries are mutated in place.
class matrix_builder {
  public:
    matrix_builder(fp_field f, index_t rows, index_t cols) : m_(f, rows, cols) {}

    void add(index_t r, index_t c, std::uint32_t v) {
        if (v == 0) return;
        m_.check_index(r, c);
        m_.col_data_[c].push_back({r, v});
    }

    void add(index_t r, index_t c, std::int64_t v) { add(r, c, m_.field_.reduce(v)); }

    /// Adds s * block at offset (r0, c0).
    void add_block(index_t r0, index_t c0, const sparse_matrix& block, std::uint32_t s = 1) {
        for (const auto& e : block.entries()) add(r0 + e.row, c0 + e.col, m_.field_.mul(e.coeff, s));
    }

    sparse_matrix build() {
        m_.normalize();
        return std::move(m_);
    }

  private:
    sparse_matrix m_;
};

/// Dense bit-packed GF(2) matrix, one 64-bit word strip per row.  This is
/// the fast path behind rank and products at p = 2; it round-trips
/// losslessly with the sparse form.
class bit_matrix {
  public:
    bit_matrix(index_t rows, index_t cols)
        : rows_(rows), cols_(cols), words_((static_cast<std::size_t>(cols) + 63) / 64),
          data_(static_cast<std::size_t>(rows) * words_, 0) {}

    static bit_matrix from_sparse(const sparse_matrix& m) {
        if (m.field().characteristic() != 2) throw error("bit_matrix requires GF(2)");
        bit_matrix b(m.rows(), m.cols());
        for (const auto& e : m.entries()) b.set(e.row, e.col);
        return b;
    }

    sparse_matrix to_sparse() const {
        std::vector<sparse_matrix::entry> es;
        for (index_t r = 0; r < rows_; ++r)
            for (index_t c = 0; c < cols_; ++c)
                if (get(r, c)) es.push_back({r, c, 1});
        return sparse_matrix::from_entries(fp_field(2), rows_, cols_, es);
    }

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    void set(index_t r, index_t c) { data_[word_index(r, c)] |= bit(c); }
    bool get(index_t r, index_t c) const { return (data_[word_index(r, c)] & bit(c)) != 0; }

    void xor_rows(index_t dst, index_t src) {
        std::uint64_t* d = &data_[static_cast<std::size_t>(dst) * words_];
        const std::uint64_t* s = &data_[static_cast<std::size_t>(src) * words_];
        for (std::size_t w = 0; w < words_; ++w) d[w] ^= s[w];
    }

    index_t rank() const {
        bit_matrix work = *this;
        index_t r = 0;
        for (index_t c = 0; c < work.cols_ && r < work.rows_; ++c) {
            index_t pivot = -1;
            for (index_t i = r; i < work.rows_; ++i)
                if (work.get(i, c)) {
                    pivot = i;
                    break;
                }
            if (pivot < 0) continue;
            work.swap_rows(pivot, r);
            for (index_t i = 0; i < work.rows_; ++i)
                if (i != r && work.get(i, c)) work.xor_rows(i, r);
            ++r;
        }
        return r;
    }

    friend bit_matrix operator*(const bit_matrix& a, const bit_matrix& b) {
        if (a.cols_ != b.rows_) throw error("dimension mismatch in bit-matrix product");
        bit_matrix m(a.rows_, b.cols_);
        for (index_t i = 0; i < a.rows_; ++i)
            for (index_t k = 0; k < a.cols_; ++k)
                if (a.get(i, k)) m.xor_rows_external(i, b, k);
        return m;
    }

    bool operator==(const bit_matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    void swap_rows(index_t a, index_t b) {
        if (a == b) return;
        for (std::size_t w = 0; w < words_; ++w)
            std::swap(data_[static_cast<std::size_t>(a) * words_ + w],
                      data_[static_cast<std::size_t>(b) * words_ + w]);
    }

    void xor_rows_external(index_t dst, const bit_matrix& other, index_t src) {
        std::uint64_t* d = &data_[static_cast<std::size_t>(dst) * words_];
        const std::uint64_t* s = &other.data_[static_cast<std::size_t>(src) * other.words_];
        for (std::size_t w = 0; w < words_; ++w) d[w] ^= s[w];
    }

    std::size_t word_index(index_t r, index_t c) const {
        return static_cast<std::size_t>(r) * words_ + static_cast<std::size_t>(c) / 64;
    }
    static std::uint64_t bit(index_t c) { return std::uint64_t(1) << (c % 64); }

    index_t rows_, cols_;
    std::size_t words_;
    std::vector<std::uint64_t> data_;
};

namespace detail {

/// Rank by plain elimination over GF(p); the generic path used for odd p
/// and for cross-checking the packed GF(2) path.  Pivot choice: first
/// structurally nonzero entry in column order.
inline index_t rank_generic(const sparse_matrix& m) {
    const fp_field& f = m.field();
    std::vector<std::vector<std::uint32_t>> a(
        static_cast<std::size_t>(m.rows()),
        std::vector<std::uint32_t>(static_cast<std::size_t>(m.cols()), 0));
    for (const auto& e : m.entries()) a[e.row][e.col] = e.coeff;
    index_t rank = 0;
    for (index_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
        index_t pivot = -1;
        for (index_t r = rank; r < m.rows(); ++r)
            if (a[r][c] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[pivot], a[rank]);
        std::uint32_t pinv = f.inv(a[rank][c]);
        for (index_t r = 0; r < m.rows(); ++r) {
            if (r == rank || a[r][c] == 0) continue;
            std::uint32_t factor = f.mul(a[r][c], pinv);
            for (index_t j = c; j < m.cols(); ++j)
                a[r][j] = f.sub(a[r][j], f.mul(factor, a[rank][j]));
        }
        ++rank;
    }
    return rank;
}

} // namespace detail

inline index_t rank(const sparse_matrix& m) {
    if (m.field().characteristic() == 2) return bit_matrix::from_sparse(m).rank();
    return detail::rank_generic(m);
}

/// Basis of the right null space, as columns of the returned matrix.
/// rank(m) + result.cols() == m.cols().
inline sparse_matrix kernel_basis(const sparse_matrix& m) {
    const fp_field& f = m.field();
    const index_t nr = m.rows(), nc = m.cols();
    std::vector<std::vector<std::uint32_t>> a(
        static_cast<std::size_t>(nr), std::vector<std::uint32_t>(static_cast<std::size_t>(nc), 0));
    for (const auto& e : m.entries()) a[e.row][e.col] = e.coeff;

    std::vector<index_t> pivot_col; // pivot column of row i of the echelon form
    index_t r = 0;
    for (index_t c = 0; c < nc && r < nr; ++c) {
        index_t pivot = -1;
        for (index_t i = r; i < nr; ++i)
            if (a[i][c] != 0) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[pivot], a[r]);
        std::uint32_t pinv = f.inv(a[r][c]);
        for (index_t j = c; j < nc; ++j) a[r][j] = f.mul(a[r][j], pinv);
        for (index_t i = 0; i < nr; ++i) {
            if (i == r || a[i][c] == 0) continue;
            std::uint32_t factor = a[i][c];
            for (index_t j = c; j < nc; ++j) a[i][j] = f.sub(a[i][j], f.mul(factor, a[r][j]));
        }
        pivot_col.push_back(c);
        ++r;
    }

    std::vector<bool> is_pivot(static_cast<std::size_t>(nc), false);
    for (index_t c : pivot_col) is_pivot[c] = true;

    std::vector<sparse_matrix::entry> es;
    index_t k = 0;
    for (index_t c = 0; c < nc; ++c) {
        if (is_pivot[c]) continue;
        // free column c: kernel vector has 1 at c, -a[i][c] at each pivot column
        es.push_back({c, k, 1});
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            if (a[i][c] != 0) es.push_back({pivot_col[i], k, f.neg(a[i][c])});
        ++k;
    }
    return sparse_matrix::from_entries(f, nc, k, es);
}

} // namespace specseq
