#include "fraclab/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fraclab/kv.hpp"

namespace fraclab {

RatVec SimilarityMap::apply(const RatVec& x) const {
  RatVec rx = rot * x;
  for (auto& v : rx) v *= rho;
  return vec_add(rx, shift);
}

SimilarityMap SimilarityMap::compose(const SimilarityMap& inner) const {
  // (f ∘ g)(x) = rho_f rho_g (O_f O_g) x + rho_f O_f b_g + b_f
  SimilarityMap out;
  out.rho = rho * inner.rho;
  out.rot = rot * inner.rot;
  out.shift = apply(inner.shift);
  return out;
}

SimilarityMap SimilarityMap::identity(int dim) {
  return SimilarityMap{Rat(1), RatMat::identity(dim), RatVec(dim, Rat(0))};
}

bool SimilarityMap::is_identity_map() const {
  if (rho != 1 || !rot.is_identity()) return false;
  for (const auto& s : shift)
    if (s != 0) return false;
  return true;
}

std::set<long> prime_factors(const Int& x) {
  std::set<long> out;
  Int n = abs(x);
  if (n <= 1) return out;
  for (long p = 2; Int(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      out.insert(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) {
    if (!n.fits_slong_p()) throw DomainError("prime factor too large");
    out.insert(n.get_si());
  }
  return out;
}

RationalIfs::RationalIfs(int dim, std::vector<SimilarityMap> maps,
                         std::vector<Rat> lambda)
    : dim_(dim), maps_(std::move(maps)), lambda_(std::move(lambda)) {
  if (dim_ < 1) throw DomainError("dimension must be >= 1");
  if (maps_.size() < 1) throw DomainError("empty IFS");
  if (maps_.size() != lambda_.size())
    throw DomainError("probability vector length mismatch");
  Rat sum(0);
  for (const auto& l : lambda_) {
    if (l <= 0) throw DomainError("probabilities must be positive");
    sum += l;
  }
  if (sum != 1) throw DomainError("probabilities must sum to 1 exactly");

  RatMat id = RatMat::identity(dim_);
  for (const auto& m : maps_) {
    if (m.rho <= 0 || m.rho >= 1)
      throw DomainError("contraction ratio must lie in (0,1)");
    if (m.rot.rows() != dim_ || m.rot.cols() != dim_ ||
        static_cast<int>(m.shift.size()) != dim_)
      throw DomainError("map dimension mismatch");
    if (!(m.rot.transpose() * m.rot == id))
      throw DomainError("rotation is not exactly orthogonal");
    if (m.rot.det() != 1) throw DomainError("rotation must have determinant 1");
  }

  // S(F): primes in num/den of rho_i, denominators of shifts and rotations.
  for (const auto& m : maps_) {
    for (long p : prime_factors(m.rho.get_num())) primes_.insert(p);
    for (long p : prime_factors(m.rho.get_den())) primes_.insert(p);
    for (const auto& s : m.shift)
      for (long p : prime_factors(s.get_den())) primes_.insert(p);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (long p : prime_factors(m.rot(i, j).get_den())) primes_.insert(p);
  }

  lambda_cum_.resize(lambda_.size());
  Rat acc(0);
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    acc += lambda_[i];
    lambda_cum_[i] = acc;
  }
}

RationalIfs RationalIfs::missing_digit(long base,
                                       const std::vector<long>& digits) {
  if (base < 2) throw DomainError("base must be >= 2");
  if (digits.size() < 1) throw DomainError("need at least one digit");
  std::vector<SimilarityMap> maps;
  for (long d : digits) {
    if (d < 0 || d >= base) throw DomainError("digit out of range");
    SimilarityMap m;
    m.rho = Rat(1, base);
    m.rot = RatMat::identity(1);
    m.shift = {make_rat(d, base)};
    maps.push_back(std::move(m));
  }
  std::vector<Rat> lambda(digits.size(), Rat(1, long(digits.size())));
  return RationalIfs(1, std::move(maps), std::move(lambda));
}

namespace {

RationalIfs ifs_from_kv(const std::vector<KvLine>& kvs) {
  // Missing-digit shorthand takes precedence if present.
  for (const auto& kv : kvs) {
    if (kv.key == "missing_digit") {
      long base = -1;
      std::vector<long> digits;
      for (const auto& part : split(kv.value, ' ')) {
        auto p = trim(part);
        if (p.empty()) continue;
        auto eq = p.find('=');
        if (eq == std::string::npos)
          throw DomainError("missing_digit: expected base=<p> digits=<list>");
        std::string k = p.substr(0, eq), v = p.substr(eq + 1);
        if (k == "base") base = std::stol(v);
        else if (k == "digits")
          for (const auto& dstr : split(v, ','))
            digits.push_back(std::stol(trim(dstr)));
        else
          throw DomainError("missing_digit: unknown field " + k);
      }
      if (base < 2 || digits.empty())
        throw DomainError("missing_digit: base and digits required");
      return RationalIfs::missing_digit(base, digits);
    }
  }

  int dim = -1;
  int alphabet = -1;
  std::map<int, Rat> rho;
  std::map<int, RatVec> shift;
  std::map<int, RatVec> rot_raw;
  std::map<int, Rat> lambda;
  auto parse_vec = [](const std::string& v) {
    RatVec out;
    for (const auto& piece : split(v, ',')) out.push_back(parse_rat(trim(piece)));
    return out;
  };
  for (const auto& kv : kvs) {
    if (kv.key == "dim") dim = std::stoi(kv.value);
    else if (kv.key == "alphabet") alphabet = std::stoi(kv.value);
    else if (kv.key.rfind("rho.", 0) == 0)
      rho[std::stoi(kv.key.substr(4))] = parse_rat(kv.value);
    else if (kv.key.rfind("shift.", 0) == 0)
      shift[std::stoi(kv.key.substr(6))] = parse_vec(kv.value);
    else if (kv.key.rfind("rot.", 0) == 0)
      rot_raw[std::stoi(kv.key.substr(4))] = parse_vec(kv.value);
    else if (kv.key.rfind("lambda.", 0) == 0)
      lambda[std::stoi(kv.key.substr(7))] = parse_rat(kv.value);
    else
      throw DomainError("line " + std::to_string(kv.line_no) +
                        ": unknown key " + kv.key);
  }
  if (dim < 1) throw DomainError("missing key: dim");
  if (alphabet < 1) throw DomainError("missing key: alphabet");
  std::vector<SimilarityMap> maps;
  std::vector<Rat> lams;
  for (int i = 0; i < alphabet; ++i) {
    if (!rho.count(i)) throw DomainError("missing key: rho." + std::to_string(i));
    if (!shift.count(i))
      throw DomainError("missing key: shift." + std::to_string(i));
    if (!lambda.count(i))
      throw DomainError("missing key: lambda." + std::to_string(i));
    SimilarityMap m;
    m.rho = rho[i];
    m.shift = shift[i];
    if (static_cast<int>(m.shift.size()) != dim)
      throw DomainError("shift." + std::to_string(i) + ": wrong length");
    if (rot_raw.count(i)) {
      const auto& e = rot_raw[i];
      if (static_cast<int>(e.size()) != dim * dim)
        throw DomainError("rot." + std::to_string(i) + ": wrong length");
      m.rot = RatMat(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m.rot(r, c) = e[r * dim + c];
    } else {
      m.rot = RatMat::identity(dim);
    }
    maps.push_back(std::move(m));
    lams.push_back(lambda[i]);
  }
  return RationalIfs(dim, std::move(maps), std::move(lams));
}

}  // namespace

RationalIfs RationalIfs::from_file(const std::string& path) {
  return ifs_from_kv(parse_kv_file(path));
}

RationalIfs RationalIfs::from_spec_string(const std::string& spec) {
  // "missing:base=5,digits=0,1,2" or "file:<path>".
  if (spec.rfind("missing:", 0) == 0) {
    long base = -1;
    std::vector<long> digits;
    std::string rest = spec.substr(8);
    // digits=... consumes the remaining comma-separated values.
    std::size_t dpos = rest.find("digits=");
    if (dpos == std::string::npos)
      throw DomainError("ifs spec: digits=<list> required");
    std::string head = rest.substr(0, dpos);
    for (const auto& piece : split(head, ',')) {
      auto p = trim(piece);
      if (p.empty()) continue;
      auto eq = p.find('=');
      if (eq == std::string::npos || p.substr(0, eq) != "base")
        throw DomainError("ifs spec: expected base=<p>");
      base = std::stol(p.substr(eq + 1));
    }
    for (const auto& piece : split(rest.substr(dpos + 7), ','))
      if (!trim(piece).empty()) digits.push_back(std::stol(trim(piece)));
    if (base < 2 || digits.empty())
      throw DomainError("ifs spec: base and digits required");
    return missing_digit(base, digits);
  }
  if (spec.rfind("file:", 0) == 0) return from_file(spec.substr(5));
  return from_file(spec);
}

Rat RationalIfs::rho_min() const {
  Rat m = maps_[0].rho;
  for (const auto& f : maps_) m = std::min(m, f.rho);
  return m;
}

Rat RationalIfs::rho_max() const {
  Rat m = maps_[0].rho;
  for (const auto& f : maps_) m = std::max(m, f.rho);
  return m;
}

Rat RationalIfs::lambda_min() const {
  Rat m = lambda_[0];
  for (const auto& l : lambda_) m = std::min(m, l);
  return m;
}

Rat RationalIfs::lambda_max() const {
  Rat m = lambda_[0];
  for (const auto& l : lambda_) m = std::max(m, l);
  return m;
}

Rat RationalIfs::average_contraction() const {
  Rat r(0);
  for (std::size_t i = 0; i < maps_.size(); ++i) r += lambda_[i] * maps_[i].rho;
  return r;
}

bool RationalIfs::is_missing_digit(long* base_out) const {
  if (dim_ != 1) return false;
  const Rat& r0 = maps_[0].rho;
  if (r0.get_num() != 1) return false;
  Int base = r0.get_den();
  if (!base.fits_slong_p()) return false;
  for (const auto& m : maps_) {
    if (m.rho != r0 || !m.rot.is_identity()) return false;
    Rat b = m.shift[0] * Rat(base);  // must be an integer digit in [0, base)
    if (b.get_den() != 1) return false;
    if (b < 0 || b >= base) return false;
  }
  if (base_out) *base_out = base.get_si();
  return true;
}

void RationalIfs::check_letter(int i) const {
  if (i < 0 || i >= alphabet_size())
    throw DomainError("letter out of alphabet: " + std::to_string(i));
}

SimilarityMap RationalIfs::compose_word(const Word& w) const {
  SimilarityMap acc = SimilarityMap::identity(dim_);
  for (int letter : w) {
    check_letter(letter);
    acc = acc.compose(maps_[letter]);
  }
  return acc;
}

Rat RationalIfs::word_rho(const Word& w) const {
  Rat r(1);
  for (int letter : w) {
    check_letter(letter);
    r *= maps_[letter].rho;
  }
  return r;
}

Rat RationalIfs::cylinder_measure(const Word& w) const {
  Rat r(1);
  for (int letter : w) {
    check_letter(letter);
    r *= lambda_[letter];
  }
  return r;
}

Rat RationalIfs::markov_iterate(const std::function<Rat(const RatVec&)>& f,
                                const RatVec& x, int k,
                                long enumeration_cap) const {
  if (k < 0) throw DomainError("markov_iterate: k must be >= 0");
  double terms = std::pow(double(alphabet_size()), double(k));
  if (terms > double(enumeration_cap))
    throw DomainError("markov_iterate: enumeration too large, use sampling");
  // P^k(f)(x) = sum_i lambda_i P^{k-1}(f)(f_i(x)).
  std::function<Rat(const RatVec&, int)> rec = [&](const RatVec& y,
                                                   int depth) -> Rat {
    if (depth == 0) return f(y);
    Rat acc(0);
    for (int i = 0; i < alphabet_size(); ++i)
      acc += lambda_[i] * rec(maps_[i].apply(y), depth - 1);
    return acc;
  };
  return rec(x, k);
}

double RationalIfs::markov_sample(const std::function<double(const RatVec&)>& f,
                                  const RatVec& x, int k, long samples,
                                  Rng& rng) const {
  if (samples <= 0) throw DomainError("markov_sample: need samples > 0");
  double acc = 0;
  for (long s = 0; s < samples; ++s) {
    RatVec y = x;
    for (int step = 0; step < k; ++step) {
      std::size_t i = rng.next_weighted(lambda_cum_);
      y = maps_[i].apply(y);
    }
    acc += f(y);
  }
  return acc / double(samples);
}

Rat RationalIfs::attractor_radius_bound() const {
  // sup_K |x|_2 <= max_i |b_i|_2 / (1 - rho_max), and |.|_inf <= |.|_2.
  Rat max_b_sq(0);
  for (const auto& m : maps_) max_b_sq = std::max(max_b_sq, vec_norm2_sq(m.shift));
  Rat num = sqrt_upper(max_b_sq);
  return num / (Rat(1) - rho_max());
}

RationalIfs::SamplePoint RationalIfs::sample_point(int depth, Rng& rng) const {
  return sample_point_with_prefix({}, depth, rng);
}

RationalIfs::SamplePoint RationalIfs::sample_point_with_prefix(
    const Word& prefix, int depth, Rng& rng) const {
  if (depth < 1) throw DomainError("sample depth must be >= 1");
  Word w = prefix;
  while (static_cast<int>(w.size()) < depth)
    w.push_back(static_cast<int>(rng.next_weighted(lambda_cum_)));
  SimilarityMap fw = compose_word(w);
  SamplePoint out;
  out.point = fw.shift;  // f_w(0)
  out.word = std::move(w);
  out.bound = fw.rho * attractor_radius_bound();
  return out;
}

std::vector<Word> RationalIfs::prefix_set(const Rat& eps) const {
  if (eps <= 0 || eps > 1) throw DomainError("prefix_set: eps must be in (0,1]");
  std::vector<Word> out;
  // Expand words while rho_w >= eps; children crossing below eps are minimal.
  std::function<void(Word&, const Rat&)> rec = [&](Word& w, const Rat& rho_w) {
    for (int i = 0; i < alphabet_size(); ++i) {
      Rat r = rho_w * maps_[i].rho;
      w.push_back(i);
      if (r < eps) out.push_back(w);
      else rec(w, r);
      w.pop_back();
    }
  };
  Word root;
  rec(root, Rat(1));
  return out;
}

double RationalIfs::moran_dimension() const {
  auto f = [&](double s) {
    double acc = 0;
    for (const auto& m : maps_) acc += std::pow(to_d(m.rho), s);
    return acc - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0) hi *= 2;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

Rat RationalIfs::cocycle_average(const std::vector<Rat>& tau, int n,
                                 bool verify_by_enumeration) const {
  if (n < 0) throw DomainError("cocycle_average: n must be >= 0");
  if (tau.size() != lambda_.size())
    throw DomainError("cocycle_average: index set mismatch");
  Rat base(0);
  for (std::size_t i = 0; i < tau.size(); ++i) base += lambda_[i] * tau[i];
  Rat closed = pow_rat(base, n);
  if (verify_by_enumeration) {
    std::function<Rat(int)> rec = [&](int depth) -> Rat {
      if (depth == 0) return Rat(1);
      // sum over first letter; the cocycle splits multiplicatively.
      Rat acc(0);
      Rat tail = rec(depth - 1);
      for (std::size_t i = 0; i < tau.size(); ++i)
        acc += lambda_[i] * tau[i] * tail;
      return acc;
    };
    // Full enumeration without the multiplicative shortcut:
    std::function<Rat(int, Rat, Rat)> brute = [&](int depth, Rat lw,
                                                  Rat tw) -> Rat {
      if (depth == 0) return lw * tw;
      Rat acc(0);
      for (std::size_t i = 0; i < tau.size(); ++i)
        acc += brute(depth - 1, lw * lambda_[i], tw * tau[i]);
      return acc;
    };
    Rat enumerated = brute(n, Rat(1), Rat(1));
    if (enumerated != closed)
      throw std::logic_error("cocycle_average: enumeration mismatch");
  }
  return closed;
}

namespace {

// Vertices of the image of the box (lo,hi) under x -> A x + b.
std::vector<RatVec> image_vertices(const RatMat& a, const RatVec& b,
                                   const RatVec& lo, const RatVec& hi) {
  int d = static_cast<int>(lo.size());
  std::vector<RatVec> verts;
  for (int mask = 0; mask < (1 << d); ++mask) {
    RatVec corner(d);
    for (int i = 0; i < d; ++i) corner[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    verts.push_back(vec_add(a * corner, b));
  }
  return verts;
}

Rat dot(const RatVec& a, const RatVec& b) {
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec cross3(const RatVec& a, const RatVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// Separating-axis test: do the open interiors of the two convex hulls miss
// each other? Valid for parallelepipeds in dimension <= 3.
bool interiors_disjoint(const RatMat& a1, const std::vector<RatVec>& v1,
                        const RatMat& a2, const std::vector<RatVec>& v2) {
  int d = a1.rows();
  std::vector<RatVec> axes;
  RatMat inv1 = a1.inverse().transpose();
  RatMat inv2 = a2.inverse().transpose();
  for (int m = 0; m < d; ++m) {
    RatVec n1(d), n2(d);
    for (int i = 0; i < d; ++i) {
      n1[i] = inv1(i, m);
      n2[i] = inv2(i, m);
    }
    axes.push_back(n1);
    axes.push_back(n2);
  }
  if (d == 3) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        RatVec e1(3), e2(3);
        for (int r = 0; r < 3; ++r) {
          e1[r] = a1(r, i);
          e2[r] = a2(r, j);
        }
        RatVec c = cross3(e1, e2);
        if (c[0] != 0 || c[1] != 0 || c[2] != 0) axes.push_back(c);
      }
  }
  for (const auto& axis : axes) {
    Rat min1, max1, min2, max2;
    bool first = true;
    for (const auto& v : v1) {
      Rat p = dot(axis, v);
      if (first || p < min1) min1 = p;
      if (first || p > max1) max1 = p;
      first = false;
    }
    first = true;
    for (const auto& v : v2) {
      Rat p = dot(axis, v);
      if (first || p < min2) min2 = p;
      if (first || p > max2) max2 = p;
      first = false;
    }
    if (max1 <= min2 || max2 <= min1) return true;
  }
  return false;
}

}  // namespace

bool RationalIfs::verify_osc(const RatVec& lo, const RatVec& hi) const {
  for (int i = 0; i < dim_; ++i)
    if (!(lo[i] < hi[i])) throw DomainError("verify_osc: empty box");

  std::vector<RatMat> lin;
  std::vector<std::vector<RatVec>> verts;
  for (const auto& m : maps_) {
    RatMat a = m.rot * m.rho;
    lin.push_back(a);
    verts.push_back(image_vertices(a, m.shift, lo, hi));
  }
  // Containment: every image vertex inside the closed box implies the open
  // image sits inside the open box (images have nonempty interior).
  for (const auto& vs : verts)
    for (const auto& v : vs)
      for (int i = 0; i < dim_; ++i)
        if (v[i] < lo[i] || v[i] > hi[i]) return false;
  // Pairwise disjoint open images.
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j) {
      if (dim_ == 1) {
        Rat lo1 = std::min(verts[i][0][0], verts[i][1][0]);
        Rat hi1 = std::max(verts[i][0][0], verts[i][1][0]);
        Rat lo2 = std::min(verts[j][0][0], verts[j][1][0]);
        Rat hi2 = std::max(verts[j][0][0], verts[j][1][0]);
        if (!(hi1 <= lo2 || hi2 <= lo1)) return false;
      } else if (!interiors_disjoint(lin[i], verts[i], lin[j], verts[j])) {
        return false;
      }
    }
  return true;
}

RationalIfs::DensityEstimate RationalIfs::cylinder_density(
    const Word& w, const std::function<bool(const RatVec&)>& pred, long samples,
    std::uint64_t seed, int depth) const {
  if (samples <= 0) throw DomainError("cylinder_density: need samples > 0");
  for (int letter : w) check_letter(letter);
  Rng rng(seed);
  long hits = 0;
  int total_depth = std::max<int>(depth, static_cast<int>(w.size()) + 1);
  for (long s = 0; s < samples; ++s) {
    auto pt = sample_point_with_prefix(w, total_depth, rng);
    if (pred(pt.point)) ++hits;
  }
  double p = double(hits) / double(samples);
  DensityEstimate out;
  out.estimate = p;
  out.stderr_ = std::sqrt(p * (1 - p) / double(samples));
  out.hits = hits;
  out.samples = samples;
  return out;
}

std::string RationalIfs::to_description() const {
  std::ostringstream os;
  os << "dim = " << dim_ << "\n";
  os << "alphabet = " << alphabet_size() << "\n";
  for (int i = 0; i < alphabet_size(); ++i) {
    os << "rho." << i << " = " << rat_str(maps_[i].rho) << "\n";
    os << "shift." << i << " = ";
    for (int j = 0; j < dim_; ++j)
      os << (j ? "," : "") << rat_str(maps_[i].shift[j]);
    os << "\n";
    if (!maps_[i].rot.is_identity()) {
      os << "rot." << i << " = ";
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c)
          os << ((r || c) ? "," : "") << rat_str(maps_[i].rot(r, c));
      os << "\n";
    }
    os << "lambda." << i << " = " << rat_str(lambda_[i]) << "\n";
  }
  return os.str();
}

}  // namespace fraclab
