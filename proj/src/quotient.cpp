#include "cogrowth/quotient.hpp"

#include <array>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "cogrowth/errors.hpp"
#include "cogrowth/subgroup.hpp"

namespace cogrowth {

namespace {

struct HandleHash {
  std::size_t operator()(const Handle& h) const noexcept {
    std::size_t s = 1469598103934665603ull;
    for (auto v : h) s = (s ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return s;
  }
};

class TrivialQuotient final : public QuotientOracle {
 public:
  using QuotientOracle::QuotientOracle;
  Handle identity() const override { return {}; }
  Handle multiply(const Handle&, int) const override { return {}; }
  std::string describe() const override { return "trivial"; }
};

class CyclicQuotient final : public QuotientOracle {
 public:
  CyclicQuotient(FreeGroupRank rank, std::int64_t n, std::vector<std::int64_t> images)
      : QuotientOracle(rank), n_(n), images_(std::move(images)) {}
  Handle identity() const override { return {0}; }
  Handle multiply(const Handle& h, int li) const override {
    const std::int64_t g = images_[static_cast<std::size_t>(li / 2)];
    const std::int64_t step = (li & 1) ? n_ - g : g;
    return {(h[0] + step) % n_};
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "cyclic:" << n_ << ":";
    for (std::size_t i = 0; i < images_.size(); ++i) os << (i ? "," : "") << images_[i];
    return os.str();
  }

 private:
  std::int64_t n_;
  std::vector<std::int64_t> images_;
};

class PermutationQuotient final : public QuotientOracle {
 public:
  PermutationQuotient(FreeGroupRank rank, std::vector<std::vector<std::int64_t>> perms)
      : QuotientOracle(rank), perms_(std::move(perms)) {
    for (const auto& p : perms_) {
      std::vector<std::int64_t> inv(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<std::int64_t>(i);
      inverses_.push_back(std::move(inv));
    }
  }
  Handle identity() const override {
    Handle h(perms_.front().size());
    std::iota(h.begin(), h.end(), 0);
    return h;
  }
  Handle multiply(const Handle& h, int li) const override {
    const auto& p = (li & 1) ? inverses_[static_cast<std::size_t>(li / 2)] : perms_[static_cast<std::size_t>(li / 2)];
    Handle out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = p[static_cast<std::size_t>(h[i])];
    return out;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "perm:";
    for (std::size_t g = 0; g < perms_.size(); ++g) {
      os << (g ? ";" : "");
      for (std::size_t i = 0; i < perms_[g].size(); ++i) os << (i ? "," : "") << perms_[g][i];
    }
    return os.str();
  }

 private:
  std::vector<std::vector<std::int64_t>> perms_;
  std::vector<std::vector<std::int64_t>> inverses_;
};

class FreeQuotient final : public QuotientOracle {
 public:
  using QuotientOracle::QuotientOracle;
  Handle identity() const override { return {}; }
  Handle multiply(const Handle& h, int li) const override {
    Handle out = h;
    if (!out.empty() && out.back() == (li ^ 1)) {
      out.pop_back();
    } else {
      out.push_back(li);
    }
    return out;
  }
  std::string describe() const override { return "free"; }
};

class Psl2Quotient final : public QuotientOracle {
 public:
  Psl2Quotient(FreeGroupRank rank, std::int64_t p, std::vector<std::array<std::int64_t, 4>> mats)
      : QuotientOracle(rank), p_(p), mats_(std::move(mats)) {
    for (auto& m : mats_) {
      if (p_ > 0) {
        for (auto& v : m) v = ((v % p_) + p_) % p_;
      }
      // Inverse of [[a, b], [c, d]] with det 1 is [[d, -b], [-c, a]].
      std::array<std::int64_t, 4> inv{m[3], -m[1], -m[2], m[0]};
      inverses_.push_back(reduce(inv));
      m = reduce(m);
    }
  }
  Handle identity() const override {
    const auto id = reduce({1, 0, 0, 1});
    return Handle(id.begin(), id.end());
  }
  Handle multiply(const Handle& h, int li) const override {
    const auto& m = (li & 1) ? inverses_[static_cast<std::size_t>(li / 2)] : mats_[static_cast<std::size_t>(li / 2)];
    std::array<std::int64_t, 4> out{};
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        std::int64_t acc = 0;
        for (int k = 0; k < 2; ++k) {
          std::int64_t term = 0;
          if (__builtin_mul_overflow(h[static_cast<std::size_t>(2 * r + k)], m[static_cast<std::size_t>(2 * k + c)], &term) ||
              __builtin_add_overflow(acc, term, &acc)) {
            throw BudgetError("PSL(2, Z) entries overflow 64 bits", 0);
          }
        }
        out[static_cast<std::size_t>(2 * r + c)] = p_ > 0 ? ((acc % p_) + p_) % p_ : acc;
      }
    }
    const auto n = reduce(out);
    return Handle(n.begin(), n.end());
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "psl2:" << p_ << ":";
    for (std::size_t g = 0; g < mats_.size(); ++g) {
      os << (g ? ";" : "") << mats_[g][0] << "," << mats_[g][1] << "," << mats_[g][2] << ","
         << mats_[g][3];
    }
    return os.str();
  }

 private:
  // Representative of {M, -M}: the first nonzero entry is made positive
  // (mod p: the smaller of v and p - v).
  std::array<std::int64_t, 4> reduce(std::array<std::int64_t, 4> m) const {
    for (auto v : m) {
      if (v == 0) continue;
      const bool flip = p_ > 0 ? (p_ - v) < v : v < 0;
      if (flip) {
        for (auto& w : m) w = p_ > 0 ? (p_ - w) % p_ : -w;
      }
      break;
    }
    return m;
  }

  std::int64_t p_;
  std::vector<std::array<std::int64_t, 4>> mats_;
  std::vector<std::array<std::int64_t, 4>> inverses_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& t : split(s, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != t.size()) throw PreconditionError("quotient: bad integer '" + t + "'");
    out.push_back(v);
  }
  return out;
}

void require_generators(FreeGroupRank rank, std::size_t got, const std::string& what) {
  if (got != static_cast<std::size_t>(rank.k())) {
    throw PreconditionError(what + ": expected " + std::to_string(rank.k()) + " generator images, got " +
                            std::to_string(got));
  }
}

}  // namespace

std::unique_ptr<QuotientOracle> trivial_quotient(FreeGroupRank rank) {
  return std::make_unique<TrivialQuotient>(rank);
}

std::unique_ptr<QuotientOracle> cyclic_quotient(FreeGroupRank rank, std::int64_t n,
                                                std::vector<std::int64_t> images) {
  if (n < 1) throw PreconditionError("cyclic quotient: n must be >= 1");
  require_generators(rank, images.size(), "cyclic quotient");
  for (auto& g : images) g = ((g % n) + n) % n;
  return std::make_unique<CyclicQuotient>(rank, n, std::move(images));
}

std::unique_ptr<QuotientOracle> permutation_quotient(FreeGroupRank rank,
                                                     std::vector<std::vector<std::int64_t>> perms) {
  require_generators(rank, perms.size(), "permutation quotient");
  const std::size_t d = perms.front().size();
  if (d == 0) throw PreconditionError("permutation quotient: empty permutation");
  for (const auto& p : perms) {
    if (p.size() != d) throw PreconditionError("permutation quotient: degree mismatch");
    std::vector<char> seen(d, 0);
    for (auto v : p) {
      if (v < 0 || static_cast<std::size_t>(v) >= d || seen[static_cast<std::size_t>(v)]) {
        throw PreconditionError("permutation quotient: not a permutation");
      }
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }
  return std::make_unique<PermutationQuotient>(rank, std::move(perms));
}

std::unique_ptr<QuotientOracle> free_quotient(FreeGroupRank rank) {
  return std::make_unique<FreeQuotient>(rank);
}

std::unique_ptr<QuotientOracle> psl2_quotient(FreeGroupRank rank, std::int64_t p,
                                              std::vector<std::array<std::int64_t, 4>> mats) {
  if (p < 0 || p == 1) throw PreconditionError("psl2 quotient: p must be 0 or >= 2");
  require_generators(rank, mats.size(), "psl2 quotient");
  for (const auto& m : mats) {
    __int128 det = static_cast<__int128>(m[0]) * m[3] - static_cast<__int128>(m[1]) * m[2];
    if (p > 0) det = ((det % p) + p) % p;
    if (det != 1) throw PreconditionError("psl2 quotient: generator matrix must have determinant 1");
  }
  return std::make_unique<Psl2Quotient>(rank, p, std::move(mats));
}

std::unique_ptr<QuotientOracle> parse_quotient(FreeGroupRank rank, const std::string& spec) {
  if (spec == "trivial") return trivial_quotient(rank);
  if (spec == "free") return free_quotient(rank);
  const auto parts = split(spec, ':');
  if (parts.size() == 3 && parts[0] == "cyclic") {
    const auto n = parse_ints(parts[1]);
    if (n.size() != 1) throw PreconditionError("cyclic quotient: bad order");
    return cyclic_quotient(rank, n[0], parse_ints(parts[2]));
  }
  if (parts.size() == 2 && parts[0] == "perm") {
    std::vector<std::vector<std::int64_t>> perms;
    for (const auto& p : split(parts[1], ';')) perms.push_back(parse_ints(p));
    return permutation_quotient(rank, std::move(perms));
  }
  if (parts.size() == 3 && parts[0] == "psl2") {
    const auto p = parse_ints(parts[1]);
    if (p.size() != 1) throw PreconditionError("psl2 quotient: bad modulus");
    std::vector<std::array<std::int64_t, 4>> mats;
    for (const auto& m : split(parts[2], ';')) {
      const auto v = parse_ints(m);
      if (v.size() != 4) throw PreconditionError("psl2 quotient: matrices need 4 entries");
      mats.push_back({v[0], v[1], v[2], v[3]});
    }
    return psl2_quotient(rank, p[0], std::move(mats));
  }
  throw PreconditionError("unknown quotient '" + spec + "'");
}

QuotientGrowth quotient_dp_growth(const QuotientOracle& q, std::size_t n_max,
                                  std::uint64_t budget) {
  if (n_max < 1) throw PreconditionError("n_max must be >= 1");
  const int letters = q.rank().letters();
  std::unordered_map<Handle, std::size_t, HandleHash> ids;
  std::vector<Handle> elements;
  std::vector<std::vector<std::size_t>> table;  // cached right multiplication
  auto intern = [&](Handle h) {
    auto [it, inserted] = ids.emplace(std::move(h), elements.size());
    if (inserted) {
      if (elements.size() >= budget) {
        throw BudgetError("quotient reached more than " + std::to_string(budget) + " elements",
                          elements.size() + 1);
      }
      elements.push_back(it->first);
      table.emplace_back(static_cast<std::size_t>(letters), SIZE_MAX);
    }
    return it->second;
  };
  auto step = [&](std::size_t e, int li) {
    auto& slot = table[e][static_cast<std::size_t>(li)];
    if (slot == SIZE_MAX) {
      const std::size_t r = intern(q.multiply(elements[e], li));
      table[e][static_cast<std::size_t>(li)] = r;
      return r;
    }
    return slot;
  };

  const std::size_t id = intern(q.identity());
  QuotientGrowth out;
  out.counts.assign(n_max + 1, 0);
  out.counts[0] = 1;
  // State key: element * letters + last letter.
  std::map<std::size_t, std::uint64_t> cur;
  for (int li = 0; li < letters; ++li) cur[step(id, li) * static_cast<std::size_t>(letters) + static_cast<std::size_t>(li)] += 1;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n > 1) {
      std::map<std::size_t, std::uint64_t> next;
      for (const auto& [key, w] : cur) {
        const std::size_t e = key / static_cast<std::size_t>(letters);
        const int last = static_cast<int>(key % static_cast<std::size_t>(letters));
        for (int li = 0; li < letters; ++li) {
          if (li == (last ^ 1)) continue;
          auto& slot = next[step(e, li) * static_cast<std::size_t>(letters) + static_cast<std::size_t>(li)];
          if (__builtin_add_overflow(slot, w, &slot)) {
            throw BudgetError("kernel count overflows 64 bits at length " + std::to_string(n), n);
          }
        }
      }
      cur = std::move(next);
    }
    std::uint64_t closed = 0;
    for (int li = 0; li < letters; ++li) {
      const auto it = cur.find(id * static_cast<std::size_t>(letters) + static_cast<std::size_t>(li));
      if (it != cur.end()) closed += it->second;
    }
    out.counts[n] = closed;
  }
  out.states = elements.size();
  out.delta = log_count_slope(out.counts, &out.fit_lo, &out.fit_hi);
  out.trivial_kernel = true;
  for (std::size_t n = 1; n <= n_max; ++n) out.trivial_kernel = out.trivial_kernel && out.counts[n] == 0;
  return out;
}

}  // namespace cogrowth
