#include "epmdi/interference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "epmdi/mode_transform.hpp"
#include "epmdi/scenario.hpp"

namespace epmdi {

BeamSplitterSpec BeamSplitterSpec::balanced() {
  const double s = 1.0 / std::sqrt(2.0);
  return {Complex{s, 0.0}, Complex{0.0, s}};
}

bool BeamSplitterSpec::valid(double tol) const {
  const double unit = std::norm(t) + std::norm(r) - 1.0;
  const Complex cross = std::conj(r) * t + r * std::conj(t);
  return std::abs(unit) <= tol && std::abs(cross) <= tol;
}

double JointOutcomeDistribution::sum() const {
  double s = 0.0;
  for (const auto& row : p)
    for (double x : row) s += x;
  return s;
}

double JointOutcomeDistribution::success() const {
  return p[0][0] + p[0][1] + p[1][0] + p[1][1];
}

std::vector<Complex> beam_splitter_output(int n1, int n2,
                                          const BeamSplitterSpec& bs) {
  const ModeMatrix m{{{bs.t, bs.r}, {bs.r, bs.t}}};
  return two_mode_transform(n1, n2, m);
}

AmplitudeState interfere_mode_pair(const AmplitudeState& in1,
                                   const AmplitudeState& in2,
                                   const BeamSplitterSpec& bs) {
  if (in1.ports.size() != 1 || in2.ports.size() != 1) {
    throw std::invalid_argument("interfere_mode_pair: expected single-port states");
  }
  AmplitudeState rails;
  rails.ports = {"port3", "port4"};
  for (const auto& [key1, a1] : in1.entries) {
    for (const auto& [key2, a2] : in2.entries) {
      const Occupation o1 = key1[0];
      const Occupation o2 = key2[0];
      const auto bh = beam_splitter_output(o1.h, o2.h, bs);
      const auto bv = beam_splitter_output(o1.v, o2.v, bs);
      const int h_total = o1.h + o2.h;
      const int v_total = o1.v + o2.v;
      const Complex base = a1 * a2;
      for (int zh = 0; zh <= h_total; ++zh) {
        for (int zv = 0; zv <= v_total; ++zv) {
          const Complex amp = base * bh[zh] * bv[zv];
          if (amp == Complex{}) continue;
          rails.add({Occupation{zh, zv}, Occupation{h_total - zh, v_total - zv}},
                    amp);
        }
      }
    }
  }
  return rails;
}

namespace {

double click_prob(int photons, const DetectorParams& det) {
  return 1.0 - (1.0 - det.y0) * std::pow(1.0 - det.eta_d, photons);
}

std::array<double, 3> fold_pattern(int k3h, int k3v, int k4h, int k4v,
                                   const DetectorParams& det) {
  const double c3h = click_prob(k3h, det);
  const double c3v = click_prob(k3v, det);
  const double c4h = click_prob(k4h, det);
  const double c4v = click_prob(k4v, det);
  const double psi_minus = c3h * (1.0 - c3v) * (1.0 - c4h) * c4v +
                           (1.0 - c3h) * c3v * c4h * (1.0 - c4v);
  const double psi_plus = c3h * c3v * (1.0 - c4h) * (1.0 - c4v) +
                          (1.0 - c3h) * (1.0 - c3v) * c4h * c4v;
  return {psi_plus, psi_minus, 1.0 - psi_plus - psi_minus};
}

}  // namespace

std::array<double, 3> bsm_outcome_probabilities(const AmplitudeState& rails,
                                                const DetectorParams& det) {
  if (rails.ports.size() != 2) {
    throw std::invalid_argument("bsm_outcome_probabilities: expected a two-port rail state");
  }
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (const auto& [key, amp] : rails.entries) {
    const double weight = std::norm(amp);
    if (weight == 0.0) continue;
    const auto f = fold_pattern(key[0].h, key[0].v, key[1].h, key[1].v, det);
    for (int o = 0; o < 3; ++o) out[o] += weight * f[o];
  }
  return out;
}

namespace {

std::uint32_t pack_occ(const Occupation& occ) {
  return static_cast<std::uint32_t>((occ.h << 4) | occ.v);
}

std::uint32_t pack_quad(const Occupation& a, const Occupation& b,
                        const Occupation& c, const Occupation& d) {
  return (pack_occ(a) << 24) | (pack_occ(b) << 16) | (pack_occ(c) << 8) |
         pack_occ(d);
}

}  // namespace

PdcDensity make_pdc_density(const LossRecordMixture& mixture) {
  std::unordered_map<std::uint32_t, Complex> acc;
  double mass = 0.0;
  for (const auto& [record, state] : mixture.components) {
    std::vector<std::pair<std::array<Occupation, 2>, Complex>> flat;
    flat.reserve(state.entries.size());
    for (const auto& [key, amp] : state.entries) {
      flat.push_back({{key[0], key[1]}, amp});
      mass += std::norm(amp);
    }
    for (const auto& [ket, a] : flat) {
      for (const auto& [bra, b] : flat) {
        if (ket[0].total() != bra[0].total() || ket[1].total() != bra[1].total())
          continue;
        acc[pack_quad(ket[0], ket[1], bra[0], bra[1])] += a * std::conj(b);
      }
    }
  }
  PdcDensity rho;
  rho.mass = mass;
  rho.entries.reserve(acc.size());
  std::vector<std::pair<std::uint32_t, Complex>> sorted(acc.begin(), acc.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (const auto& [key, w] : sorted) {
    const auto unpack = [](std::uint32_t v) {
      return Occupation{static_cast<int>((v >> 4) & 0xf),
                        static_cast<int>(v & 0xf)};
    };
    rho.entries.push_back({unpack(key >> 24), unpack(key >> 16), unpack(key >> 8),
                           unpack(key), w});
  }
  return rho;
}

PdcDensity make_pdc_density(double lambda, const ChannelParams& ch_d,
                            const ChannelParams& ch_e, int n_max) {
  if (lambda < 0.0) throw std::invalid_argument("make_pdc_density: lambda must be >= 0");
  if (n_max < 0) throw std::invalid_argument("make_pdc_density: n_max must be >= 0");

  struct Branch {
    std::uint32_t occs;  // packed (david, ethan) survivor occupations
    Complex amp;
  };
  // Per-record coherent amplitude lists, keyed by the packed lost occupations.
  std::unordered_map<std::uint32_t, std::vector<Branch>> records;

  const double cosh2 = 1.0 + lambda;
  const double tanh1 = std::sqrt(lambda / (1.0 + lambda));
  const double sq_td = std::sqrt(ch_d.transmittance);
  const double sq_ld = std::sqrt(1.0 - ch_d.transmittance);
  const double sq_te = std::sqrt(ch_e.transmittance);
  const double sq_le = std::sqrt(1.0 - ch_e.transmittance);
  const ModeMatrix rot_d = rotation_matrix(ch_d.theta_rad);
  const ModeMatrix rot_e = rotation_matrix(ch_e.theta_rad);

  std::vector<std::vector<std::vector<Complex>>> spread_d(
      n_max + 1, std::vector<std::vector<Complex>>(n_max + 1));
  std::vector<std::vector<std::vector<Complex>>> spread_e = spread_d;
  for (int h = 0; h <= n_max; ++h) {
    for (int v = 0; v + h <= n_max; ++v) {
      spread_d[h][v] = two_mode_transform(h, v, rot_d);
      spread_e[h][v] = two_mode_transform(h, v, rot_e);
    }
  }

  for (int n = 0; n <= n_max; ++n) {
    const double weight = std::pow(tanh1, n) / cosh2;
    if (weight == 0.0 && n > 0) continue;
    for (int m = 0; m <= n; ++m) {
      const double branch_amp = (m % 2 == 0 ? weight : -weight);
      const Occupation d0{n - m, m};
      const Occupation e0{m, n - m};
      for (int sdh = d0.h; sdh >= 0; --sdh) {
        for (int sdv = d0.v; sdv >= 0; --sdv) {
          const int lost_d = d0.h - sdh + d0.v - sdv;
          if (ch_d.transmittance == 0.0 && sdh + sdv > 0) continue;
          if (ch_d.transmittance == 1.0 && lost_d > 0) continue;
          const double amp_d =
              std::sqrt(binomial(d0.h, sdh) * binomial(d0.v, sdv)) *
              std::pow(sq_td, sdh + sdv) * std::pow(sq_ld, lost_d);
          const auto& rd = spread_d[sdh][sdv];
          for (int seh = e0.h; seh >= 0; --seh) {
            for (int sev = e0.v; sev >= 0; --sev) {
              const int lost_e = e0.h - seh + e0.v - sev;
              if (ch_e.transmittance == 0.0 && seh + sev > 0) continue;
              if (ch_e.transmittance == 1.0 && lost_e > 0) continue;
              const double amp_e =
                  std::sqrt(binomial(e0.h, seh) * binomial(e0.v, sev)) *
                  std::pow(sq_te, seh + sev) * std::pow(sq_le, lost_e);
              const auto& re = spread_e[seh][sev];
              const double base = branch_amp * amp_d * amp_e;
              const std::uint32_t record_key =
                  pack_quad({d0.h - sdh, d0.v - sdv}, {e0.h - seh, e0.v - sev},
                            {0, 0}, {0, 0});
              auto& branches = records[record_key];
              const int nd = sdh + sdv;
              const int ne = seh + sev;
              for (int zd = 0; zd <= nd; ++zd) {
                const Complex wd = base * rd[zd];
                if (wd == Complex{}) continue;
                for (int ze = 0; ze <= ne; ++ze) {
                  const Complex amp = wd * re[ze];
                  if (amp == Complex{}) continue;
                  const std::uint32_t occs =
                      (pack_occ({zd, nd - zd}) << 8) | pack_occ({ze, ne - ze});
                  bool merged = false;
                  for (Branch& b : branches) {
                    if (b.occs == occs) {
                      b.amp += amp;
                      merged = true;
                      break;
                    }
                  }
                  if (!merged) branches.push_back({occs, amp});
                }
              }
            }
          }
        }
      }
    }
  }

  std::unordered_map<std::uint32_t, Complex> acc;
  double mass = 0.0;
  for (const auto& [record, branches] : records) {
    for (const Branch& ket : branches) {
      mass += std::norm(ket.amp);
      const Occupation kd{static_cast<int>((ket.occs >> 12) & 0xf),
                          static_cast<int>((ket.occs >> 8) & 0xf)};
      const Occupation ke{static_cast<int>((ket.occs >> 4) & 0xf),
                          static_cast<int>(ket.occs & 0xf)};
      for (const Branch& bra : branches) {
        const Occupation bd{static_cast<int>((bra.occs >> 12) & 0xf),
                            static_cast<int>((bra.occs >> 8) & 0xf)};
        const Occupation be{static_cast<int>((bra.occs >> 4) & 0xf),
                            static_cast<int>(bra.occs & 0xf)};
        if (kd.total() != bd.total() || ke.total() != be.total()) continue;
        acc[pack_quad(kd, ke, bd, be)] += ket.amp * std::conj(bra.amp);
      }
    }
  }

  PdcDensity rho;
  rho.mass = mass;
  std::vector<std::pair<std::uint32_t, Complex>> sorted(acc.begin(), acc.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  rho.entries.reserve(sorted.size());
  for (const auto& [key, w] : sorted) {
    const auto unpack = [](std::uint32_t v) {
      return Occupation{static_cast<int>((v >> 4) & 0xf),
                        static_cast<int>(v & 0xf)};
    };
    rho.entries.push_back({unpack(key >> 24), unpack(key >> 16), unpack(key >> 8),
                           unpack(key), w});
  }
  return rho;
}

// ---------------------------------------------------------------------------
// OutcomeEngine
// ---------------------------------------------------------------------------

struct OutcomeEngine::Impl {
  DetectorParams det;
  int n_max;
  BeamSplitterSpec bs;
  int rail_base;  // occupancy base for packing rail counts (2 n_max + 1)

  std::vector<Occupation> occs;   // total <= n_max, deterministic order
  std::vector<int> occ_id_table;  // (h * (n_max+1) + v) -> id or -1

  std::vector<std::array<double, 3>> fold;  // per packed rail occupation

  struct PairList {
    std::vector<std::pair<int, int>> pairs;  // (ket occ id, bra occ id)
    std::vector<int> lookup;                 // s * n_occ + sp -> pair index or -1
  };
  PairList pairs_z;  // ket = bra only
  PairList pairs_x;  // all pairs with equal totals

  // v[a][pair] = sum_k Amp(a, s; k) conj(Amp(a, s'; k)) fold(k), per outcome
  std::vector<std::vector<std::array<Complex, 3>>> v_z;
  std::vector<std::vector<std::array<Complex, 3>>> v_x;

  using AmpMap = std::vector<std::pair<std::uint32_t, Complex>>;

  int occ_id(const Occupation& occ) const {
    if (occ.h < 0 || occ.v < 0 || occ.total() > n_max) return -1;
    return occ_id_table[occ.h * (n_max + 1) + occ.v];
  }

  std::uint32_t pack_rails(int k3h, int k3v, int k4h, int k4v) const {
    return static_cast<std::uint32_t>(
        ((k3h * rail_base + k3v) * rail_base + k4h) * rail_base + k4v);
  }

  AmpMap amp_map_rect(const Occupation& a, const Occupation& s,
                      const std::vector<std::vector<std::vector<Complex>>>& bs_tab) const {
    const auto& bh = bs_tab[a.h][s.h];
    const auto& bv = bs_tab[a.v][s.v];
    const int h_total = a.h + s.h;
    const int v_total = a.v + s.v;
    AmpMap map;
    map.reserve((h_total + 1) * (v_total + 1));
    for (int zh = 0; zh <= h_total; ++zh) {
      for (int zv = 0; zv <= v_total; ++zv) {
        const Complex amp = bh[zh] * bv[zv];
        if (amp == Complex{}) continue;
        map.push_back({pack_rails(zh, zv, h_total - zh, v_total - zv), amp});
      }
    }
    std::sort(map.begin(), map.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return map;
  }

  AmpMap amp_map_diag(const Occupation& a, const Occupation& s,
                      const std::vector<std::vector<std::vector<Complex>>>& bs_tab,
                      const std::vector<std::vector<std::vector<Complex>>>& rot45) const {
    // Beam splitter acts on the diagonal pair; rotate each output port back
    // into the detector frame before reading off rail occupations.
    const auto& bp = bs_tab[a.h][s.h];
    const auto& bm = bs_tab[a.v][s.v];
    const int p_total = a.h + s.h;
    const int m_total = a.v + s.v;
    std::unordered_map<std::uint32_t, Complex> acc;
    for (int z3p = 0; z3p <= p_total; ++z3p) {
      for (int z3m = 0; z3m <= m_total; ++z3m) {
        const Complex base = bp[z3p] * bm[z3m];
        if (base == Complex{}) continue;
        const int z4p = p_total - z3p;
        const int z4m = m_total - z3m;
        const auto& r3 = rot45[z3p][z3m];
        const auto& r4 = rot45[z4p][z4m];
        const int n3 = z3p + z3m;
        const int n4 = z4p + z4m;
        for (int k3h = 0; k3h <= n3; ++k3h) {
          const Complex with3 = base * r3[k3h];
          if (with3 == Complex{}) continue;
          for (int k4h = 0; k4h <= n4; ++k4h) {
            const Complex amp = with3 * r4[k4h];
            if (amp == Complex{}) continue;
            acc[pack_rails(k3h, n3 - k3h, k4h, n4 - k4h)] += amp;
          }
        }
      }
    }
    AmpMap map(acc.begin(), acc.end());
    std::sort(map.begin(), map.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return map;
  }

  std::array<Complex, 3> overlap(const AmpMap& ket, const AmpMap& bra) const {
    std::array<Complex, 3> out{};
    std::size_t i = 0, j = 0;
    while (i < ket.size() && j < bra.size()) {
      if (ket[i].first < bra[j].first) {
        ++i;
      } else if (ket[i].first > bra[j].first) {
        ++j;
      } else {
        const Complex w = ket[i].second * std::conj(bra[j].second);
        const auto& f = fold[ket[i].first];
        for (int o = 0; o < 3; ++o) out[o] += w * f[o];
        ++i;
        ++j;
      }
    }
    return out;
  }

  void build() {
    rail_base = 2 * n_max + 1;
    occ_id_table.assign((n_max + 1) * (n_max + 1), -1);
    for (int h = 0; h <= n_max; ++h) {
      for (int v = 0; v + h <= n_max; ++v) {
        occ_id_table[h * (n_max + 1) + v] = static_cast<int>(occs.size());
        occs.push_back({h, v});
      }
    }
    const int n_occ = static_cast<int>(occs.size());

    const int fold_size = rail_base * rail_base * rail_base * rail_base;
    fold.resize(fold_size);
    for (int k3h = 0; k3h < rail_base; ++k3h)
      for (int k3v = 0; k3v < rail_base; ++k3v)
        for (int k4h = 0; k4h < rail_base; ++k4h)
          for (int k4v = 0; k4v < rail_base; ++k4v)
            fold[pack_rails(k3h, k3v, k4h, k4v)] =
                fold_pattern(k3h, k3v, k4h, k4v, det);

    pairs_z.lookup.assign(n_occ * n_occ, -1);
    pairs_x.lookup.assign(n_occ * n_occ, -1);
    for (int s = 0; s < n_occ; ++s) {
      pairs_z.lookup[s * n_occ + s] = static_cast<int>(pairs_z.pairs.size());
      pairs_z.pairs.push_back({s, s});
      for (int sp = 0; sp < n_occ; ++sp) {
        if (occs[s].total() != occs[sp].total()) continue;
        pairs_x.lookup[s * n_occ + sp] = static_cast<int>(pairs_x.pairs.size());
        pairs_x.pairs.push_back({s, sp});
      }
    }

    // Beam-splitter tables for inputs up to n_max photons each, and
    // diagonal-frame rotations for ports holding up to 2 n_max photons.
    std::vector<std::vector<std::vector<Complex>>> bs_tab(
        n_max + 1, std::vector<std::vector<Complex>>(n_max + 1));
    for (int n1 = 0; n1 <= n_max; ++n1)
      for (int n2 = 0; n2 <= n_max; ++n2)
        bs_tab[n1][n2] = beam_splitter_output(n1, n2, bs);

    const ModeMatrix h45 = diagonal_frame_matrix();
    std::vector<std::vector<std::vector<Complex>>> rot45(
        2 * n_max + 1, std::vector<std::vector<Complex>>(2 * n_max + 1));
    for (int n1 = 0; n1 <= 2 * n_max; ++n1)
      for (int n2 = 0; n1 + n2 <= 2 * n_max; ++n2)
        rot45[n1][n2] = two_mode_transform(n1, n2, h45);

    const auto build_v = [&](const PairList& pairs, bool diag_frame) {
      std::vector<std::vector<std::array<Complex, 3>>> v(
          n_occ, std::vector<std::array<Complex, 3>>(pairs.pairs.size()));
      std::vector<AmpMap> maps(n_occ);
      for (int a = 0; a < n_occ; ++a) {
        for (int s = 0; s < n_occ; ++s) {
          maps[s] = diag_frame ? amp_map_diag(occs[a], occs[s], bs_tab, rot45)
                               : amp_map_rect(occs[a], occs[s], bs_tab);
        }
        for (std::size_t pi = 0; pi < pairs.pairs.size(); ++pi) {
          v[a][pi] = overlap(maps[pairs.pairs[pi].first],
                             maps[pairs.pairs[pi].second]);
        }
      }
      return v;
    };
    v_z = build_v(pairs_z, false);
    v_x = build_v(pairs_x, true);
  }
};

OutcomeEngine::OutcomeEngine(const DetectorParams& det, int n_max,
                             const BeamSplitterSpec& bs)
    : impl_(std::make_unique<Impl>()) {
  if (n_max < 1 || n_max > 8) {
    throw std::invalid_argument("OutcomeEngine: n_max must be in [1, 8]");
  }
  if (det.eta_d < 0.0 || det.eta_d > 1.0 || det.y0 < 0.0 || det.y0 > 1.0) {
    throw std::invalid_argument("OutcomeEngine: detector parameters must be in [0, 1]");
  }
  if (!bs.valid(1e-9)) {
    throw std::invalid_argument("OutcomeEngine: beam splitter violates its constraints");
  }
  impl_->det = det;
  impl_->n_max = n_max;
  impl_->bs = bs;
  impl_->build();
}

OutcomeEngine::~OutcomeEngine() = default;
OutcomeEngine::OutcomeEngine(OutcomeEngine&&) noexcept = default;
OutcomeEngine& OutcomeEngine::operator=(OutcomeEngine&&) noexcept = default;

const DetectorParams& OutcomeEngine::detector() const { return impl_->det; }
int OutcomeEngine::n_max() const { return impl_->n_max; }

JointOutcomeDistribution OutcomeEngine::joint(
    const PhotonNumberDistribution& alice, const PhotonNumberDistribution& bob,
    const PdcDensity& rho, Frame frame) const {
  const Impl& im = *impl_;
  const int n_occ = static_cast<int>(im.occs.size());

  const auto occ_probs = [&](const PhotonNumberDistribution& dist,
                             std::vector<double>& p) {
    double mass = 0.0;
    p.assign(n_occ, 0.0);
    for (const auto& [occ, prob] : dist.entries) {
      if (prob == 0.0) continue;
      const int id = im.occ_id(occ);
      if (id < 0) {
        throw std::invalid_argument("OutcomeEngine::joint: occupation beyond n_max");
      }
      p[id] += prob;
      mass += prob;
    }
    return mass;
  };

  std::vector<double> pa, pb;
  const double mass_a = occ_probs(alice, pa);
  const double mass_b = occ_probs(bob, pb);

  const Impl::PairList& pairs =
      frame == Frame::rectilinear ? im.pairs_z : im.pairs_x;
  const auto& v = frame == Frame::rectilinear ? im.v_z : im.v_x;

  const std::size_t n_pairs = pairs.pairs.size();
  std::vector<std::array<Complex, 3>> t_d(n_pairs), t_e(n_pairs);
  for (int a = 0; a < n_occ; ++a) {
    const double wa = pa[a];
    const double wb = pb[a];
    if (wa == 0.0 && wb == 0.0) continue;
    for (std::size_t pi = 0; pi < n_pairs; ++pi) {
      for (int o = 0; o < 3; ++o) {
        if (wa != 0.0) t_d[pi][o] += wa * v[a][pi][o];
        if (wb != 0.0) t_e[pi][o] += wb * v[a][pi][o];
      }
    }
  }

  std::array<std::array<Complex, 3>, 3> acc{};
  for (const auto& e : rho.entries) {
    const int sd = im.occ_id(e.sd);
    const int se = im.occ_id(e.se);
    const int sdp = im.occ_id(e.sdp);
    const int sep = im.occ_id(e.sep);
    if (sd < 0 || se < 0 || sdp < 0 || sep < 0) {
      throw std::invalid_argument("OutcomeEngine::joint: density occupation beyond n_max");
    }
    const int pd = pairs.lookup[sd * n_occ + sdp];
    const int pe = pairs.lookup[se * n_occ + sep];
    if (pd < 0 || pe < 0) continue;
    for (int od = 0; od < 3; ++od) {
      const Complex left = e.w * t_d[pd][od];
      if (left == Complex{}) continue;
      for (int oe = 0; oe < 3; ++oe) {
        acc[od][oe] += left * t_e[pe][oe];
      }
    }
  }

  JointOutcomeDistribution out;
  for (int od = 0; od < 3; ++od) {
    for (int oe = 0; oe < 3; ++oe) {
      out.p[od][oe] = std::max(0.0, acc[od][oe].real());
    }
  }
  // Probability mass beyond the source truncations cannot produce a joint
  // success record here; it is accounted as a double failure.
  const double represented = mass_a * mass_b * rho.mass;
  out.p[2][2] += std::max(0.0, 1.0 - represented);
  return out;
}

JointOutcomeDistribution joint_outcomes(const ScenarioParams& scenario,
                                        Basis basis, int bit_a, int bit_b) {
  const OutcomeEngine engine(scenario.det, scenario.n_max);
  const auto rho = make_pdc_density(
      propagate_epr(pdc_state(scenario.lambda, scenario.n_max), scenario.ch_d,
                    scenario.ch_e, scenario.n_max));
  const auto alice = propagate_wcp(scenario.mu_a, {basis, bit_a}, scenario.ch_a,
                                   scenario.n_max);
  const auto bob = propagate_wcp(scenario.mu_b, {basis, bit_b}, scenario.ch_b,
                                 scenario.n_max);
  const Frame frame = basis == Basis::z ? Frame::rectilinear : Frame::diagonal;
  return engine.joint(alice, bob, rho, frame);
}

}  // namespace epmdi
