#include "cbn/f2linalg.hpp"

#include <algorithm>
#include <bit>

namespace cbn {

BitVector BitVector::unit(std::size_t n, std::size_t i) {
    BitVector v(n);
    v.set(i);
    return v;
}

BitVector& BitVector::operator^=(const BitVector& o) {
    if (o.n_ != n_) throw LinalgError("bit vector size mismatch");
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
    return *this;
}

bool BitVector::any() const {
    return std::any_of(w_.begin(), w_.end(), [](std::uint64_t x) { return x != 0; });
}

std::size_t BitVector::count() const {
    std::size_t c = 0;
    for (std::uint64_t x : w_) c += std::popcount(x);
    return c;
}

long BitVector::next(std::size_t from) const {
    if (from >= n_) return -1;
    std::size_t k = from >> 6;
    std::uint64_t x = w_[k] & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (x) return static_cast<long>((k << 6) + std::countr_zero(x));
        if (++k >= w_.size()) return -1;
        x = w_[k];
    }
}

std::vector<std::size_t> BitVector::ones() const {
    std::vector<std::size_t> out;
    for (long i = next(0); i >= 0; i = next(i + 1)) out.push_back(i);
    return out;
}

bool BitVector::dot(const BitVector& o) const {
    if (o.n_ != n_) throw LinalgError("bit vector size mismatch");
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < w_.size(); ++k) acc ^= w_[k] & o.w_[k];
    return std::popcount(acc) & 1;
}

std::string BitVector::str() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

F2Matrix F2Matrix::identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

F2Matrix F2Matrix::from_columns(std::size_t rows, const std::vector<BitVector>& cols) {
    F2Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows) throw LinalgError("column length mismatch");
        for (std::size_t i : cols[j].ones()) m.set(i, j);
    }
    return m;
}

BitVector F2Matrix::column(std::size_t j) const {
    BitVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        if (get(i, j)) v.set(i);
    return v;
}

BitVector F2Matrix::apply(const BitVector& v) const {
    if (v.size() != cols_) throw LinalgError("matrix-vector size mismatch");
    BitVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        if (r_[i].dot(v)) out.set(i);
    return out;
}

F2Matrix F2Matrix::operator*(const F2Matrix& o) const {
    if (cols_ != o.rows_) throw LinalgError("matrix product size mismatch");
    F2Matrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (long k = r_[i].next(0); k >= 0; k = r_[i].next(k + 1)) out.r_[i] ^= o.r_[k];
    return out;
}

F2Matrix& F2Matrix::operator+=(const F2Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw LinalgError("matrix sum size mismatch");
    for (std::size_t i = 0; i < rows_; ++i) r_[i] ^= o.r_[i];
    return *this;
}

F2Matrix F2Matrix::transpose() const {
    F2Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (long j = r_[i].next(0); j >= 0; j = r_[i].next(j + 1)) t.set(j, i);
    return t;
}

bool F2Matrix::is_zero() const {
    return std::none_of(r_.begin(), r_.end(), [](const BitVector& r) { return r.any(); });
}

std::string F2Matrix::dump() const {
    std::string s = std::to_string(rows_) + "x" + std::to_string(cols_) + "\n";
    for (const BitVector& r : r_) s += r.str() + "\n";
    return s;
}

std::size_t rank(const F2Matrix& m) {
    EchelonBasis b(m.cols(), 0);
    std::size_t r = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) r += b.insert(m.row(i), BitVector(0));
    return r;
}

std::vector<BitVector> kernel_basis(const F2Matrix& m) {
    // Reduced row echelon form; free columns give the basis.
    std::vector<BitVector> rows;
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    std::vector<long> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < rows.size(); ++c) {
        std::size_t p = r;
        while (p < rows.size() && !rows[p].get(c)) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != r && rows[i].get(c)) rows[i] ^= rows[r];
        pivot_col.push_back(static_cast<long>(c));
        ++r;
    }
    std::vector<bool> is_pivot(m.cols(), false);
    for (long c : pivot_col) is_pivot[c] = true;
    std::vector<BitVector> out;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        BitVector v(m.cols());
        v.set(f);
        for (std::size_t k = 0; k < pivot_col.size(); ++k)
            if (rows[k].get(f)) v.set(pivot_col[k]);
        out.push_back(std::move(v));
    }
    return out;
}

bool EchelonBasis::insert(BitVector v, BitVector tag) {
    if (v.size() != dim_) throw LinalgError("echelon basis: dimension mismatch");
    reduce(v, tag);
    long p = v.next(0);
    if (p < 0) return false;
    pivot_[p] = static_cast<long>(vecs_.size());
    vecs_.push_back(std::move(v));
    tags_.push_back(std::move(tag));
    return true;
}

void EchelonBasis::reduce(BitVector& v, BitVector& tag) const {
    for (long p = v.next(0); p >= 0; p = v.next(p + 1)) {
        long k = pivot_[p];
        if (k < 0) continue;
        v ^= vecs_[k];
        if (tag_dim_) tag ^= tags_[k];
    }
}

HomologyData homology_at(const F2Matrix& d_out, const F2Matrix& d_in) {
    const std::size_t n = d_out.cols();
    if (d_in.rows() != n) throw LinalgError("homology_at: shape mismatch");
    if (!(d_out * d_in).is_zero()) throw LinalgError("not a complex");
    HomologyData h;
    h.space_ = n;
    h.d_out_ = d_out;
    std::vector<BitVector> cycles = kernel_basis(d_out);
    std::size_t b = rank(d_in);
    std::size_t dim = cycles.size() - b;
    h.basis_ = EchelonBasis(n, dim);
    for (std::size_t j = 0; j < d_in.cols(); ++j) h.basis_.insert(d_in.column(j), BitVector(dim));
    for (BitVector& z : cycles) {
        std::size_t k = h.reps_.size();
        if (k == dim) break;
        if (h.basis_.insert(z, BitVector::unit(dim, k))) h.reps_.push_back(z);
    }
    if (h.reps_.size() != dim) throw LinalgError("homology_at: inconsistent ranks");
    return h;
}

bool HomologyData::is_cycle(const BitVector& v) const { return !d_out_.apply(v).any(); }

BitVector HomologyData::project(const BitVector& cycle) const {
    if (cycle.size() != space_) throw LinalgError("project: dimension mismatch");
    if (!is_cycle(cycle)) throw LinalgError("project: not a cycle");
    BitVector v = cycle, tag(dimension());
    basis_.reduce(v, tag);
    if (v.any()) throw LinalgError("project: cycle outside the computed span");
    return tag;
}

F2Matrix induced_map(const F2Matrix& f, const HomologyData& src, const HomologyData& dst) {
    if (f.cols() != src.space_dimension() || f.rows() != dst.space_dimension())
        throw LinalgError("induced_map: shape mismatch");
    std::vector<BitVector> cols;
    for (const BitVector& r : src.representatives()) {
        BitVector img = f.apply(r);
        if (!dst.is_cycle(img)) throw LinalgError("not a chain map");
        cols.push_back(dst.project(img));
    }
    return F2Matrix::from_columns(dst.dimension(), cols);
}

void SparseColumns::add_entry(std::size_t col, std::uint32_t row) {
    auto& c = cols[col];
    auto it = std::lower_bound(c.begin(), c.end(), row);
    if (it != c.end() && *it == row) c.erase(it);
    else c.insert(it, row);
}

F2Matrix SparseColumns::to_dense() const {
    F2Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::uint32_t i : cols[j]) m.flip(i, j);
    return m;
}

std::size_t sparse_rank(SparseColumns m) {
    // pivot = largest row index of a reduced column
    std::vector<long> owner(m.rows, -1);
    std::size_t r = 0;
    std::vector<std::uint32_t> scratch;
    for (std::size_t j = 0; j < m.cols.size(); ++j) {
        auto& c = m.cols[j];
        while (!c.empty()) {
            long o = owner[c.back()];
            if (o < 0) break;
            const auto& p = m.cols[o];
            scratch.clear();
            std::set_symmetric_difference(c.begin(), c.end(), p.begin(), p.end(),
                                          std::back_inserter(scratch));
            c.swap(scratch);
        }
        if (!c.empty()) {
            owner[c.back()] = static_cast<long>(j);
            ++r;
        }
    }
    return r;
}

std::size_t ChainComplex::dim(int deg) const {
    if (deg < lo || deg > hi()) return 0;
    return dims[deg - lo];
}

F2Matrix ChainComplex::diff(int deg) const {
    if (deg >= lo && deg < hi()) return d[deg - lo];
    return F2Matrix(dim(deg + 1), dim(deg));
}

void ChainComplex::check() const {
    if (d.size() + 1 != dims.size()) throw LinalgError("complex: wrong number of differentials");
    for (std::size_t t = 0; t < d.size(); ++t)
        if (d[t].cols() != dims[t] || d[t].rows() != dims[t + 1])
            throw LinalgError("complex: differential shape mismatch");
    for (std::size_t t = 0; t + 1 < d.size(); ++t)
        if (!(d[t + 1] * d[t]).is_zero()) throw LinalgError("not a complex");
}

std::vector<std::size_t> ChainComplex::homology_dims() const {
    std::vector<std::size_t> out;
    for (int deg = lo; deg <= hi(); ++deg)
        out.push_back(dim(deg) - rank(diff(deg)) - rank(diff(deg - 1)));
    return out;
}

bool is_chain_map(const ComplexMap& f, const ChainComplex& src, const ChainComplex& dst) {
    int lo = std::min(src.lo, dst.lo), hi = std::max(src.hi(), dst.hi());
    auto at = [&](int deg) {
        if (deg < f.lo || deg >= f.lo + static_cast<int>(f.f.size()))
            return F2Matrix(dst.dim(deg), src.dim(deg));
        return f.f[deg - f.lo];
    };
    for (int deg = lo; deg <= hi; ++deg) {
        F2Matrix a = dst.diff(deg) * at(deg);
        F2Matrix b = at(deg + 1) * src.diff(deg);
        if (!(a == b)) return false;
    }
    return true;
}

namespace {

// Removes index k from a basis of size n: matrix of the projection.
F2Matrix drop(std::size_t n, std::size_t k) {
    F2Matrix m(n - 1, n);
    for (std::size_t i = 0, r = 0; i < n; ++i)
        if (i != k) m.set(r++, i);
    return m;
}

}  // namespace

Elimination eliminate_entry(const ChainComplex& c, int deg, std::size_t row, std::size_t col) {
    c.check();
    if (deg < c.lo || deg >= c.hi()) throw LinalgError("eliminate_entry: degree out of range");
    const F2Matrix& dk = c.d[deg - c.lo];
    if (row >= dk.rows() || col >= dk.cols()) throw LinalgError("eliminate_entry: index out of range");
    if (!dk.get(row, col)) throw LinalgError("eliminate_entry: entry is 0");

    const std::size_t nb = c.dim(deg), nc = c.dim(deg + 1);
    F2Matrix pb = drop(nb, col), pc = drop(nc, row);
    F2Matrix ib = pb.transpose(), ic = pc.transpose();

    // gamma: b -> rest of C_{deg+1}; delta: rest of C_deg -> c
    BitVector gamma = pc.apply(dk.column(col));
    BitVector delta = pb.apply(dk.row(row));

    Elimination e;
    e.reduced.lo = c.lo;
    e.reduced.dims = c.dims;
    e.reduced.dims[deg - c.lo] -= 1;
    e.reduced.dims[deg + 1 - c.lo] -= 1;
    e.forward.lo = e.backward.lo = c.lo;
    for (int t = c.lo; t <= c.hi(); ++t) {
        std::size_t n = c.dim(t);
        if (t == deg) {
            e.forward.f.push_back(pb);
            // u -> u + (delta . u) b
            F2Matrix g = ib;
            for (std::size_t j = 0; j < nb - 1; ++j)
                if (delta.get(j)) g.set(col, j);
            e.backward.f.push_back(g);
        } else if (t == deg + 1) {
            // v -> v_rest + v_c gamma
            F2Matrix f = pc;
            for (std::size_t i = 0; i < nc - 1; ++i)
                if (gamma.get(i)) f.flip(i, row);
            e.forward.f.push_back(f);
            e.backward.f.push_back(ic);
        } else {
            e.forward.f.push_back(F2Matrix::identity(n));
            e.backward.f.push_back(F2Matrix::identity(n));
        }
    }
    for (int t = c.lo; t < c.hi(); ++t) {
        const F2Matrix& m = c.d[t - c.lo];
        if (t == deg) {
            F2Matrix eps = pc * m * ib;
            for (std::size_t i = 0; i < nc - 1; ++i)
                if (gamma.get(i)) eps.row(i) ^= delta;
            e.reduced.d.push_back(eps);
        } else if (t == deg - 1) {
            e.reduced.d.push_back(pb * m);
        } else if (t == deg + 1) {
            e.reduced.d.push_back(m * ic);
        } else {
            e.reduced.d.push_back(m);
        }
    }
    e.reduced.check();
    return e;
}

}  // namespace cbn
