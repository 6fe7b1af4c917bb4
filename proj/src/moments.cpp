#include "steer/moments.hpp"

#include "steer/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace steer {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kDeterminedTol = 1e-9;
constexpr double kPinTol = 1e-8;

bool all_equal(const BobWord& word) {
  return std::all_of(word.begin(), word.end(), [&](int b) { return b == word.front(); });
}

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> reduce_alice(const std::vector<int>& alice, const std::vector<bool>& involutive) {
  std::vector<int> out;
  for (std::size_t i = 0; i < alice.size();) {
    std::size_t j = i;
    while (j < alice.size() && alice[j] == alice[i]) ++j;
    std::size_t mult = j - i;
    auto x = static_cast<std::size_t>(alice[i]);
    if (x < involutive.size() && involutive[x]) mult %= 2;
    out.insert(out.end(), mult, alice[i]);
    i = j;
  }
  return out;
}

BobWord entry_bob_word(const BobWord& left, const BobWord& right) {
  BobWord w(left.rbegin(), left.rend());
  w.insert(w.end(), right.begin(), right.end());
  return w;
}

// All sequences of length len over n letters, lexicographic, optionally without adjacent repeats.
std::vector<std::vector<int>> sequences(int n, int len, bool no_repeats) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void()> rec = [&]() {
    if (static_cast<int>(cur.size()) == len) {
      out.push_back(cur);
      return;
    }
    for (int c = 0; c < n; ++c) {
      if (no_repeats && !cur.empty() && cur.back() == c) continue;
      cur.push_back(c);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

// Sorted multisets of size len over n letters; sets only when involutive.
std::vector<std::vector<int>> multisets(int n, int len, bool distinct) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == len) {
      out.push_back(cur);
      return;
    }
    for (int c = start; c < n; ++c) {
      cur.push_back(c);
      rec(distinct ? c + 1 : c);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

double frob_inner(const CMatrix& a, const CMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

// Wick expansion of <R_{i1} ... R_{in}> for a zero-mean Gaussian state.
cplx wick(const std::vector<int>& idx, const std::function<cplx(int, int)>& two_point) {
  if (idx.empty()) return 1.0;
  if (idx.size() % 2 == 1) return 0.0;
  cplx sum = 0.0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    std::vector<int> rest;
    for (std::size_t k = 1; k < idx.size(); ++k)
      if (k != j) rest.push_back(idx[k]);
    sum += two_point(idx[0], idx[j]) * wick(rest, two_point);
  }
  return sum;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// BobAlgebra

BobAlgebra BobAlgebra::finite(std::vector<std::string> names, std::vector<Operator> ops) {
  if (names.size() != ops.size()) throw ConfigError("Bob operator names and matrices differ in count");
  if (ops.empty()) throw ConfigError("Bob algebra needs at least one operator");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty() || n.find(' ') != std::string::npos) throw ConfigError("invalid Bob operator name '" + n + "'");
    if (!seen.insert(n).second) throw ConfigError("duplicate Bob operator name '" + n + "'");
  }
  BobAlgebra alg;
  alg.dim_ = ops.front().dim();
  for (const auto& op : ops) {
    if (op.dim() != alg.dim_) throw ConfigError("Bob operators must share one dimension");
    if (!op.is_hermitian()) throw ConfigError("Bob operators must be Hermitian");
  }
  alg.names_ = std::move(names);
  alg.ops_ = std::move(ops);
  return alg;
}

BobAlgebra BobAlgebra::bosonic(int order, Index dim) {
  if (order < 1) throw ConfigError("quadrature order must be positive");
  if (dim <= order) throw ConfigError("Fock truncation must exceed the quadrature order");
  BobAlgebra alg;
  alg.dim_ = dim;
  alg.order_ = order;
  alg.names_ = {"q", "p"};
  return alg;
}

BobAlgebra BobAlgebra::pauli() {
  const auto p = pauli_set();
  return finite({"X", "Y", "Z"}, {p.x, p.y, p.z});
}

int BobAlgebra::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  throw ConfigError("unknown Bob operator '" + std::string(name) + "'");
}

CMatrix BobAlgebra::word_matrix(const BobWord& word, Index dim) const {
  for (int b : word)
    if (b < 0 || static_cast<std::size_t>(b) >= names_.size()) throw ConfigError("Bob word index out of range");
  if (!is_bosonic()) {
    if (dim != dim_) throw ConfigError("Bob operator dimension mismatch");
    CMatrix m = CMatrix::Identity(dim, dim);
    for (int b : word) m = m * ops_[static_cast<std::size_t>(b)].matrix();
    return m;
  }
  if (dim < 1) throw ConfigError("invalid Bob dimension");
  if (word.empty()) return CMatrix::Identity(dim, dim);
  const Index big = dim + static_cast<Index>(order_) * static_cast<Index>(word.size());
  const auto quads = generalized_quadratures(order_, big);
  CMatrix m = CMatrix::Identity(big, big);
  for (int b : word) m = m * (b == 0 ? quads.q : quads.p).matrix();
  return m.topLeftCorner(dim, dim);
}

std::vector<std::string> BobAlgebra::word_names(const BobWord& word) const {
  std::vector<std::string> out;
  for (int b : word) {
    if (b < 0 || static_cast<std::size_t>(b) >= names_.size()) throw ConfigError("Bob word index out of range");
    out.push_back(names_[static_cast<std::size_t>(b)]);
  }
  return out;
}

std::string BobAlgebra::word_name(const BobWord& word) const {
  std::string out;
  for (const auto& n : word_names(word)) {
    if (!out.empty()) out += ' ';
    out += n;
  }
  return out;
}

BobWord BobAlgebra::word_from_names(const std::vector<std::string>& names) const {
  BobWord w;
  for (const auto& n : names) w.push_back(index_of(n));
  return w;
}

BobWord BobAlgebra::parse_word(std::string_view text) const {
  std::istringstream in{std::string(text)};
  std::vector<std::string> parts;
  for (std::string tok; in >> tok;) parts.push_back(tok);
  return word_from_names(parts);
}

// ---------------------------------------------------------------------------------------------
// String sets

std::vector<MomentWord> raw_level_stratum(int n_alice, int n_bob, int k, LevelOptions options) {
  if (k < 0 || n_alice < 0 || n_bob < 0) throw ConfigError("level and operator counts must be non-negative");
  std::vector<MomentWord> out;
  for (int la = k; la >= 0; --la) {
    const int lb = k - la;
    if ((la > 0 && n_alice == 0) || (lb > 0 && n_bob == 0)) continue;
    for (const auto& a : sequences(n_alice, la, options.involutive_alice))
      for (const auto& b : sequences(n_bob, lb, options.involutive_bob)) out.push_back({a, b});
  }
  return out;
}

StringSet generate_level(int n_alice, int n_bob, int k, LevelOptions options) {
  if (k < 0 || n_alice < 0 || n_bob < 0) throw ConfigError("level and operator counts must be non-negative");
  StringSet set;
  set.level = k;
  for (int len = 0; len <= k; ++len) {
    for (int la = len; la >= 0; --la) {
      const int lb = len - la;
      if ((la > 0 && n_alice == 0) || (lb > 0 && n_bob == 0)) continue;
      for (const auto& a : multisets(n_alice, la, options.involutive_alice))
        for (const auto& b : sequences(n_bob, lb, options.involutive_bob)) set.words.push_back({a, b});
    }
  }
  return set;
}

StringSet custom_string_set(std::vector<MomentWord> words) {
  if (words.empty()) throw ConfigError("string set must not be empty");
  std::set<std::pair<std::vector<int>, BobWord>> seen;
  for (auto& w : words) {
    for (int x : w.alice)
      if (x < 0) throw ConfigError("negative Alice input index");
    for (int b : w.bob)
      if (b < 0) throw ConfigError("negative Bob operator index");
    std::sort(w.alice.begin(), w.alice.end());
    if (!seen.insert({w.alice, w.bob}).second) throw ConfigError("duplicate word in string set");
  }
  StringSet set;
  set.words = std::move(words);
  return set;
}

std::string describe_word(const MomentWord& word, const BobAlgebra& algebra) {
  std::string alice;
  for (int x : word.alice) alice += "A" + std::to_string(x);
  std::string bob;
  for (const auto& n : algebra.word_names(word.bob)) bob += n;
  return (alice.empty() ? "1" : alice) + "*" + (bob.empty() ? "1" : bob);
}

std::string to_string(ObservabilityPolicy policy) {
  return policy == ObservabilityPolicy::Full ? "full" : "local-restricted";
}

ObservabilityPolicy policy_from_string(std::string_view text) {
  if (text == "full") return ObservabilityPolicy::Full;
  if (text == "local-restricted") return ObservabilityPolicy::LocalRestricted;
  throw ConfigError("unknown observability policy '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------------------------
// Sources

cplx MomentSource::moment_matrix(const std::optional<AlicePower>&, const CMatrix&) const {
  throw ConfigError(describe() + " source cannot evaluate explicit Bob matrices");
}

StateSource::StateSource(QuantumState state, std::vector<ProjectiveMeasurement> measurements)
    : state_(std::move(state)), measurements_(std::move(measurements)) {
  for (const auto& m : measurements_)
    if (m.source_observable.dim() != state_.dim_a()) throw ConfigError("measurement dimension does not match Alice");
}

std::vector<double> StateSource::outcome_values(std::size_t x) const {
  if (x >= measurements_.size()) throw ConfigError("unknown input index " + std::to_string(x));
  return measurements_[x].outcomes;
}

cplx StateSource::moment_matrix(const std::optional<AlicePower>& alice, const CMatrix& bob_op) const {
  if (bob_op.rows() != state_.dim_b() || bob_op.cols() != state_.dim_b())
    throw ConfigError("Bob operator dimension mismatch");
  if (!alice || alice->power == 0) return state_.expectation(CMatrix::Identity(state_.dim_a(), state_.dim_a()), bob_op);
  if (alice->input >= measurements_.size()) throw ConfigError("unknown input index " + std::to_string(alice->input));
  return joint_moment(state_, measurements_[alice->input].source_observable, alice->power, Operator(bob_op));
}

cplx StateSource::moment(const std::optional<AlicePower>& alice, const BobWord& word, const BobAlgebra& algebra) const {
  return moment_matrix(alice, algebra.word_matrix(word, state_.dim_b()));
}

AssemblageSource::AssemblageSource(Assemblage assemblage) : assemblage_(std::move(assemblage)) {
  assemblage_.validate();
}

std::vector<double> AssemblageSource::outcome_values(std::size_t x) const {
  if (x >= assemblage_.n_inputs()) throw ConfigError("unknown input index " + std::to_string(x));
  return assemblage_.outcomes[x];
}

cplx AssemblageSource::moment_matrix(const std::optional<AlicePower>& alice, const CMatrix& bob_op) const {
  if (!alice) return joint_moment(assemblage_, 0, 0, bob_op);
  return joint_moment(assemblage_, alice->input, alice->power, bob_op);
}

cplx AssemblageSource::moment(const std::optional<AlicePower>& alice, const BobWord& word,
                              const BobAlgebra& algebra) const {
  return moment_matrix(alice, algebra.word_matrix(word, assemblage_.dim_b()));
}

GaussianSource::GaussianSource(GaussianStdForm form) : form_(form) {
  if (!form_.is_physical()) throw ConfigError("unphysical Gaussian covariance matrix");
}

cplx GaussianSource::moment(const std::optional<AlicePower>& alice, const BobWord& word,
                            const BobAlgebra& algebra) const {
  if (!algebra.is_bosonic() || algebra.order() != 1)
    throw ConfigError("Gaussian data needs the order-1 quadrature algebra for Bob");
  std::vector<int> idx;
  if (alice) {
    if (alice->input > 1) throw ConfigError("Gaussian data has inputs 0 (q_A) and 1 (p_A) only");
    idx.insert(idx.end(), static_cast<std::size_t>(alice->power), static_cast<int>(alice->input));
  }
  for (int b : word) idx.push_back(2 + b);
  const RMatrix gamma = form_.covariance();
  auto omega = [](int i, int j) {
    if (i / 2 != j / 2 || i == j) return 0.0;
    return i % 2 == 0 ? 1.0 : -1.0;
  };
  return wick(idx, [&](int i, int j) { return cplx(gamma(i, j), omega(i, j)) / 2.0; });
}

// ---------------------------------------------------------------------------------------------
// Template

CMatrix MomentTemplate::assemble(const RVector& unknown_values) const {
  if (static_cast<std::size_t>(unknown_values.size()) != unknowns.size())
    throw ConfigError("unknown value vector has the wrong length");
  CMatrix g = CMatrix::Zero(static_cast<Index>(k), static_cast<Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      cplx v = 0.0;
      for (const auto& t : entry(i, j)) v += t.coeff * unknown_values(static_cast<Index>(t.unknown));
      g(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  return g;
}

CMatrix MomentTemplate::pin_dir(std::size_t r) const {
  RVector v = RVector::Zero(static_cast<Index>(unknowns.size()));
  for (const auto& [u, c] : pin_coeffs.at(r)) v(static_cast<Index>(u)) = c;
  return assemble(v);
}

std::vector<CMatrix> MomentTemplate::unknown_dirs() const {
  const auto kk = static_cast<Index>(k);
  std::vector<CMatrix> dirs(unknowns.size(), CMatrix::Zero(kk, kk));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (const auto& term : entry(i, j)) dirs[term.unknown](static_cast<Index>(i), static_cast<Index>(j)) += term.coeff;
  return dirs;
}

CMatrix MomentTemplate::evaluate(const RVector& t) const {
  if (static_cast<std::size_t>(t.size()) != free_dirs.size()) throw ConfigError("free parameter vector has the wrong length");
  CMatrix g = gamma_obs;
  for (std::size_t f = 0; f < free_dirs.size(); ++f) g += t(static_cast<Index>(f)) * free_dirs[f];
  return g;
}

MomentTemplate build_template(const StringSet& words, const BobAlgebra& algebra, ObservabilityPolicy policy,
                              const MomentSource& source) {
  if (words.words.empty()) throw ConfigError("string set must not be empty");
  for (const auto& w : words.words) {
    for (int x : w.alice)
      if (x < 0 || static_cast<std::size_t>(x) >= source.n_inputs())
        throw ConfigError("word uses Alice input " + std::to_string(x) + " not provided by the data");
    for (int b : w.bob)
      if (b < 0 || static_cast<std::size_t>(b) >= algebra.size()) throw ConfigError("word uses an unknown Bob operator");
  }

  std::vector<bool> involutive(source.n_inputs(), false);
  for (std::size_t x = 0; x < source.n_inputs(); ++x) {
    const auto vals = source.outcome_values(x);
    involutive[x] = !vals.empty() &&
                    std::all_of(vals.begin(), vals.end(), [](double v) { return std::abs(std::abs(v) - 1.0) < 1e-12; });
  }

  MomentTemplate t;
  t.words = words;
  t.algebra = algebra;
  t.policy = policy;
  t.k = words.size();
  const std::size_t k = t.k;
  t.entries.assign(k * k, {});
  t.entry_alice.assign(k * k, {});
  t.entry_word.assign(k * k, {});

  const auto basis = HermitianBasis::gell_mann(algebra.dim());
  std::map<std::vector<int>, std::size_t> group_of;
  std::vector<std::vector<int>> group_alice;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> unknown_of;
  std::vector<std::size_t> unknown_group;

  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const auto& wi = words.words[i];
      const auto& wj = words.words[j];
      const auto alice = reduce_alice(sorted_union(wi.alice, wj.alice), involutive);
      const auto bob = entry_bob_word(wi.bob, wj.bob);
      t.entry_alice[i * k + j] = alice;
      t.entry_alice[j * k + i] = alice;
      t.entry_word[i * k + j] = bob;
      t.entry_word[j * k + i] = entry_bob_word(wj.bob, wi.bob);

      auto [git, inserted] = group_of.try_emplace(alice, group_alice.size());
      if (inserted) group_alice.push_back(alice);
      const std::size_t g = git->second;

      const auto ex = basis.expand(algebra.word_matrix(bob));
      std::vector<EntryTerm> terms;
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const cplx c(ex.re[b], ex.im[b]);
        if (c == cplx(0.0, 0.0)) continue;
        auto [uit, fresh] = unknown_of.try_emplace({g, b}, t.unknowns.size());
        if (fresh) {
          t.unknowns.push_back({alice, b});
          unknown_group.push_back(g);
        }
        terms.push_back({uit->second, c});
      }
      t.entries[i * k + j] = terms;
      if (i != j) {
        for (auto& term : terms) term.coeff = std::conj(term.coeff);
        t.entries[j * k + i] = std::move(terms);
      }
    }

  const std::size_t n_unknowns = t.unknowns.size();
  RVector u0 = RVector::Zero(static_cast<Index>(n_unknowns));
  std::vector<RVector> pin_solutions;
  std::vector<std::size_t> pin_group;
  int next_param = 0;

  for (std::size_t g = 0; g < group_alice.size(); ++g) {
    const auto& alice = group_alice[g];
    std::vector<std::size_t> ids;
    std::map<std::size_t, Index> local;
    for (std::size_t u = 0; u < n_unknowns; ++u)
      if (unknown_group[u] == g) {
        local[u] = static_cast<Index>(ids.size());
        ids.push_back(u);
      }
    const auto n = static_cast<Index>(ids.size());

    std::optional<AlicePower> alice_power;
    bool single_input = !alice.empty() && alice.front() == alice.back();
    if (single_input) alice_power = AlicePower{static_cast<std::size_t>(alice.front()), static_cast<int>(alice.size())};

    std::vector<RVector> rows;
    std::vector<double> values;
    std::vector<Pin> pins;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) {
        if (t.entry_alice[i * k + j] != alice) continue;
        const auto& bob = t.entry_word[i * k + j];
        bool observable = alice.empty() ||
                          (single_input && (policy == ObservabilityPolicy::Full || bob.size() <= 1 || all_equal(bob)));
        if (!observable) continue;
        const cplx m = source.moment(alice_power, bob, algebra);
        for (int part = 0; part < 2; ++part) {
          RVector row = RVector::Zero(n);
          for (const auto& term : t.entry(i, j))
            row(local.at(term.unknown)) = part == 0 ? term.coeff.real() : term.coeff.imag();
          const double value = part == 0 ? m.real() : m.imag();
          if (row.norm() == 0.0) {
            if (std::abs(value) > kPinTol * (1.0 + std::abs(m)))
              throw ConfigError("data violate Bob's operator algebra at entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
            continue;
          }
          rows.push_back(row);
          values.push_back(value);
          pins.push_back({i, j, part == 1, value, alice, bob});
        }
      }

    RMatrix P(static_cast<Index>(rows.size()), n);
    RVector b(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      P.row(static_cast<Index>(r)) = rows[r].transpose();
      b(static_cast<Index>(r)) = values[r];
    }

    RMatrix null_basis;
    RMatrix pinv = RMatrix::Zero(n, P.rows());
    if (P.rows() == 0) {
      null_basis = RMatrix::Identity(n, n);
    } else {
      Eigen::JacobiSVD<RMatrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      Index rank = 0;
      const double cut = kRankTol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
      while (rank < s.size() && s(rank) > cut) ++rank;
      const RMatrix& U = svd.matrixU();
      const RMatrix& V = svd.matrixV();
      for (Index r = 0; r < rank; ++r) pinv += V.col(r) * (U.col(r).transpose() / s(r));
      null_basis = V.rightCols(n - rank);
      const RVector sol = pinv * b;
      if ((P * sol - b).norm() > kPinTol * (1.0 + b.norm()))
        throw ConfigError("observable data are inconsistent with Bob's operator algebra");
      for (Index l = 0; l < n; ++l) u0(static_cast<Index>(ids[static_cast<std::size_t>(l)])) = sol(l);
    }

    for (Index l = 0; l < n; ++l) {
      auto& unk = t.unknowns[ids[static_cast<std::size_t>(l)]];
      if (null_basis.cols() == 0 || null_basis.row(l).norm() <= kDeterminedTol) {
        unk.observable = true;
        unk.value = u0(static_cast<Index>(ids[static_cast<std::size_t>(l)]));
      } else {
        unk.param = next_param++;
      }
    }

    std::vector<CMatrix> group_dirs;
    for (Index c = 0; c < null_basis.cols(); ++c) {
      RVector v = RVector::Zero(static_cast<Index>(n_unknowns));
      for (Index l = 0; l < n; ++l) v(static_cast<Index>(ids[static_cast<std::size_t>(l)])) = null_basis(l, c);
      CMatrix f = t.assemble(v);
      const double norm0 = f.norm();
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& d : group_dirs) f -= frob_inner(d, f) * d;
      const double norm = f.norm();
      if (norm <= 1e-9 * std::max(1.0, norm0)) continue;
      group_dirs.push_back(f / norm);
    }
    for (auto& d : group_dirs) {
      t.free_dirs.push_back(std::move(d));
      t.free_group.push_back(ids.front());
    }

    for (std::size_t r = 0; r < pins.size(); ++r) {
      std::vector<std::pair<std::size_t, double>> coeffs;
      for (Index l = 0; l < n; ++l)
        if (pinv(l, static_cast<Index>(r)) != 0.0) coeffs.emplace_back(ids[static_cast<std::size_t>(l)], pinv(l, static_cast<Index>(r)));
      t.pin_coeffs.push_back(std::move(coeffs));
      t.pins.push_back(std::move(pins[r]));
    }
  }

  t.gamma_obs = t.assemble(u0);
  return t;
}

CMatrix instantiate_true(const MomentTemplate& tmpl, const StateSource& source) {
  const auto& state = source.state();
  const auto& ms = source.measurements();
  auto alice_op = [&](const std::vector<int>& left, const std::vector<int>& right) {
    CMatrix a = CMatrix::Identity(state.dim_a(), state.dim_a());
    for (auto it = left.rbegin(); it != left.rend(); ++it) {
      if (static_cast<std::size_t>(*it) >= ms.size()) throw ConfigError("unknown input index");
      a = a * ms[static_cast<std::size_t>(*it)].source_observable.matrix();
    }
    for (int x : right) {
      if (static_cast<std::size_t>(x) >= ms.size()) throw ConfigError("unknown input index");
      a = a * ms[static_cast<std::size_t>(x)].source_observable.matrix();
    }
    return a;
  };
  const auto k = static_cast<Index>(tmpl.k);
  CMatrix g(k, k);
  for (std::size_t i = 0; i < tmpl.k; ++i)
    for (std::size_t j = 0; j < tmpl.k; ++j) {
      const auto& wi = tmpl.words.words[i];
      const auto& wj = tmpl.words.words[j];
      const CMatrix bob = tmpl.algebra.word_matrix(entry_bob_word(wi.bob, wj.bob), state.dim_b());
      g(static_cast<Index>(i), static_cast<Index>(j)) = state.expectation(alice_op(wi.alice, wj.alice), bob);
    }
  return g;
}

RVector true_unknown_values(const MomentTemplate& tmpl, const StateSource& source) {
  const auto& state = source.state();
  if (state.dim_b() != tmpl.algebra.dim()) throw ConfigError("state and template Bob dimensions differ");
  const auto basis = HermitianBasis::gell_mann(tmpl.algebra.dim());
  RVector v(static_cast<Index>(tmpl.unknowns.size()));
  for (std::size_t u = 0; u < tmpl.unknowns.size(); ++u) {
    const auto& unk = tmpl.unknowns[u];
    CMatrix a = CMatrix::Identity(state.dim_a(), state.dim_a());
    for (int x : unk.alice) a = a * source.measurements().at(static_cast<std::size_t>(x)).source_observable.matrix();
    v(static_cast<Index>(u)) = state.expectation(a, basis[unk.basis_index].matrix()).real();
  }
  return v;
}

}  // namespace steer
