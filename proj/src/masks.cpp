#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pwe/error.hpp"
#include "pwe/network.hpp"

namespace pwe {

namespace {

constexpr std::uint8_t kMayDef = 1;
constexpr std::uint8_t kMayUndef = 2;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxDim = 64;

double mul0(double a, double b) { return (a == 0 || b == 0) ? 0.0 : a * b; }

void interval_mul(double alo, double ahi, double blo, double bhi, double& lo, double& hi) {
    if (alo == ahi && blo == bhi) {
        lo = hi = alo * blo;
        return;
    }
    double c[4] = {mul0(alo, blo), mul0(alo, bhi), mul0(ahi, blo), mul0(ahi, bhi)};
    lo = *std::min_element(c, c + 4);
    hi = *std::max_element(c, c + 4);
}

void interval_pow(double lo, double hi, int k, double& rlo, double& rhi) {
    if (lo == hi) {
        rlo = rhi = std::pow(lo, k);
        return;
    }
    double a = std::pow(lo, k), b = std::pow(hi, k);
    if (k % 2 != 0) {
        rlo = a;
        rhi = b;
    } else if (lo >= 0) {
        rlo = a;
        rhi = b;
    } else if (hi <= 0) {
        rlo = b;
        rhi = a;
    } else {
        rlo = 0;
        rhi = std::max(a, b);
    }
}

}  // namespace

bool NumState::decided() const {
    if (!may_def) return true;
    if (may_undef) return false;
    for (size_t i = 0; i < lo.size(); ++i)
        if (lo[i] != hi[i]) return false;
    return true;
}

MaskState::MaskState(const EventNetwork& net) : net_(net) {
    const int n = static_cast<int>(net.nodes().size());
    const int slots = net.slot_count();
    tri_.assign(slots, 0);
    comp_.assign(slots, 0);
    queued_.assign(slots, 0);
    slot_node_.assign(slots, 0);
    slot_targets_.assign(slots, {});
    assigned_.assign(net.vars().size(), 0);
    std::uint32_t off = 0;
    for (int i = 0; i < n; ++i) {
        const NetNode& nd = net.node(i);
        if (nd.type.numeric() && nd.type.dim > kMaxDim) throw UnsupportedError("vector dimension too large");
        for (int t = 0; t < net.slots(i); ++t) {
            int s = net.slot(i, t);
            slot_node_[s] = i;
            comp_[s] = off;
            if (nd.type.numeric()) off += nd.type.dim;
        }
    }
    lo_.assign(off, 0.0);
    hi_.assign(off, 0.0);
    for (size_t k = 0; k < net.targets().size(); ++k) {
        const NetTarget& t = net.targets()[k];
        int s = net.slot(t.node, t.t);
        target_slot_.push_back(s);
        slot_targets_[s].push_back(static_cast<int>(k));
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return net.node(a).phase < net.node(b).phase; });
    for (int phase = 0; phase < 3; ++phase) {
        int rounds = phase == 1 ? net.iterations() : 1;
        for (int t = 0; t < rounds; ++t)
            for (int i : order) {
                if (net.node(i).phase != phase) continue;
                int s = net.slot(i, t);
                compute(i, t, tri_[s], lo_.data() + comp_[s], hi_.data() + comp_[s]);
            }
    }
    for (size_t k = 0; k < target_slot_.size(); ++k)
        if (tri_[target_slot_[k]] != 0) decided_.push_back({static_cast<int>(k), tri_[target_slot_[k]] == 1});
}

NumState MaskState::num_of(int slot, int node) const {
    NumState r;
    r.may_def = tri_[slot] & kMayDef;
    r.may_undef = tri_[slot] & kMayUndef;
    int d = net_.node(node).type.dim;
    r.lo.assign(lo_.begin() + comp_[slot], lo_.begin() + comp_[slot] + d);
    r.hi.assign(hi_.begin() + comp_[slot], hi_.begin() + comp_[slot] + d);
    return r;
}

NumState MaskState::numeric(int node, int t) const { return num_of(net_.slot(node, t), node); }

bool MaskState::slot_decided(int slot) const {
    const NetNode& nd = net_.node(slot_node_[slot]);
    std::uint8_t st = tri_[slot];
    if (!nd.type.numeric()) return st != 0;
    if (!(st & kMayDef)) return true;
    if (st & kMayUndef) return false;
    const double* lo = lo_.data() + comp_[slot];
    const double* hi = hi_.data() + comp_[slot];
    for (int i = 0; i < nd.type.dim; ++i)
        if (lo[i] != hi[i]) return false;
    return true;
}

void MaskState::compute(int node, int t, std::uint8_t& st, double* lo, double* hi) const {
    const NetNode& nd = net_.node(node);
    const int T = net_.iterations();
    auto kslot = [&](int k) { return net_.slot(k, net_.node(k).timed ? t : 0); };
    auto copy_from = [&](int s, int k) {
        st = tri_[s];
        int d = net_.node(k).type.numeric() ? net_.node(k).type.dim : 0;
        for (int i = 0; i < d; ++i) {
            lo[i] = lo_[comp_[s] + i];
            hi[i] = hi_[comp_[s] + i];
        }
    };
    auto undefined = [&]() {
        st = kMayUndef;
        for (int i = 0; i < nd.type.dim; ++i) lo[i] = hi[i] = 0;
    };
    switch (nd.kind) {
        case NodeKind::Var: return;
        case NodeKind::Const:
            if (nd.type.kind == Type::Bool) {
                st = nd.value.truth ? 1 : 2;
            } else if (!nd.value.defined) {
                undefined();
            } else {
                st = kMayDef;
                for (int i = 0; i < nd.type.dim; ++i) lo[i] = hi[i] = nd.value.v[i];
            }
            return;
        case NodeKind::Not: {
            std::uint8_t k = tri_[kslot(nd.kids[0])];
            st = k == 0 ? 0 : 3 - k;
            return;
        }
        case NodeKind::And:
        case NodeKind::Or: {
            const std::uint8_t absorb = nd.kind == NodeKind::And ? 2 : 1;
            bool unknown = false;
            for (int k : nd.kids) {
                std::uint8_t v = tri_[kslot(k)];
                if (v == absorb) {
                    st = absorb;
                    return;
                }
                if (v == 0) unknown = true;
            }
            st = unknown ? 0 : 3 - absorb;
            return;
        }
        case NodeKind::Atom: {
            int sa = kslot(nd.kids[0]), sb = kslot(nd.kids[1]);
            std::uint8_t fa = tri_[sa], fb = tri_[sb];
            if (!(fa & kMayDef) || !(fb & kMayDef)) {
                st = 1;
                return;
            }
            const double* alo = lo_.data() + comp_[sa];
            const double* ahi = hi_.data() + comp_[sa];
            const double* blo = lo_.data() + comp_[sb];
            const double* bhi = hi_.data() + comp_[sb];
            bool yes = false, no = false;
            switch (nd.cmp) {
                case Cmp::Le: yes = ahi[0] <= blo[0]; no = alo[0] > bhi[0]; break;
                case Cmp::Ge: yes = alo[0] >= bhi[0]; no = ahi[0] < blo[0]; break;
                case Cmp::Lt: yes = ahi[0] < blo[0]; no = alo[0] >= bhi[0]; break;
                case Cmp::Gt: yes = alo[0] > bhi[0]; no = ahi[0] <= blo[0]; break;
                case Cmp::Eq: {
                    yes = true;
                    for (int i = 0; i < net_.node(nd.kids[0]).type.dim; ++i) {
                        if (!(alo[i] == ahi[i] && blo[i] == bhi[i] && alo[i] == blo[i])) yes = false;
                        if (ahi[i] < blo[i] || bhi[i] < alo[i]) no = true;
                    }
                    break;
                }
            }
            if (yes) st = 1;
            else if (no && !(fa & kMayUndef) && !(fb & kMayUndef)) st = 2;
            else st = 0;
            return;
        }
        case NodeKind::Guard: {
            std::uint8_t e = tri_[kslot(nd.kids[0])];
            if (e == 2) {
                undefined();
                return;
            }
            copy_from(kslot(nd.kids[1]), nd.kids[1]);
            if (e == 0) st |= kMayUndef;
            return;
        }
        case NodeKind::Sum: {
            const int d = nd.type.dim;
            bool may_def = false, may_undef = true;
            for (int i = 0; i < d; ++i) lo[i] = hi[i] = 0.0;
            for (int k : nd.kids) {
                int s = kslot(k);
                std::uint8_t f = tri_[s];
                if (!(f & kMayDef)) continue;
                may_def = true;
                bool maybe = f & kMayUndef;
                if (!maybe) may_undef = false;
                for (int i = 0; i < d; ++i) {
                    double a = lo_[comp_[s] + i], b = hi_[comp_[s] + i];
                    lo[i] += maybe ? std::min(0.0, a) : a;
                    hi[i] += maybe ? std::max(0.0, b) : b;
                }
            }
            if (!may_def) {
                undefined();
                return;
            }
            st = kMayDef | (may_undef ? kMayUndef : 0);
            return;
        }
        case NodeKind::Prod: {
            bool may_def = true, may_undef = false;
            for (int k : nd.kids) {
                std::uint8_t f = tri_[kslot(k)];
                if (!(f & kMayDef)) may_def = false;
                if (f & kMayUndef) may_undef = true;
            }
            if (!may_def) {
                undefined();
                return;
            }
            double alo[kMaxDim], ahi[kMaxDim];
            int s0 = kslot(nd.kids[0]);
            Type at = net_.node(nd.kids[0]).type;
            for (int i = 0; i < at.dim; ++i) {
                alo[i] = lo_[comp_[s0] + i];
                ahi[i] = hi_[comp_[s0] + i];
            }
            for (size_t j = 1; j < nd.kids.size(); ++j) {
                int s = kslot(nd.kids[j]);
                Type bt = net_.node(nd.kids[j]).type;
                const double* blo = lo_.data() + comp_[s];
                const double* bhi = hi_.data() + comp_[s];
                if (at.kind == Type::Scalar && bt.kind == Type::Scalar) {
                    interval_mul(alo[0], ahi[0], blo[0], bhi[0], alo[0], ahi[0]);
                } else if (at.kind == Type::Scalar || bt.kind == Type::Scalar) {
                    double slo = at.kind == Type::Scalar ? alo[0] : blo[0];
                    double shi = at.kind == Type::Scalar ? ahi[0] : bhi[0];
                    const Type vt = at.kind == Type::Scalar ? bt : at;
                    double vlo[kMaxDim], vhi[kMaxDim];
                    for (int i = 0; i < vt.dim; ++i) {
                        vlo[i] = at.kind == Type::Scalar ? blo[i] : alo[i];
                        vhi[i] = at.kind == Type::Scalar ? bhi[i] : ahi[i];
                    }
                    for (int i = 0; i < vt.dim; ++i) interval_mul(vlo[i], vhi[i], slo, shi, alo[i], ahi[i]);
                    at = vt;
                } else {
                    double dlo = 0, dhi = 0;
                    for (int i = 0; i < at.dim; ++i) {
                        double l, h;
                        interval_mul(alo[i], ahi[i], blo[i], bhi[i], l, h);
                        dlo += l;
                        dhi += h;
                    }
                    alo[0] = dlo;
                    ahi[0] = dhi;
                    at = Type::scalar();
                }
            }
            for (int i = 0; i < nd.type.dim; ++i) {
                lo[i] = alo[i];
                hi[i] = ahi[i];
            }
            st = kMayDef | (may_undef ? kMayUndef : 0);
            return;
        }
        case NodeKind::Inv:
        case NodeKind::Pow: {
            int s = kslot(nd.kids[0]);
            std::uint8_t f = tri_[s];
            if (!(f & kMayDef)) {
                undefined();
                return;
            }
            double a = lo_[comp_[s]], b = hi_[comp_[s]];
            bool may_undef = f & kMayUndef;
            int k = nd.kind == NodeKind::Inv ? -1 : nd.exponent;
            if (k >= 0) {
                interval_pow(a, b, k, lo[0], hi[0]);
                st = kMayDef | (may_undef ? kMayUndef : 0);
                return;
            }
            if (a == 0 && b == 0) {
                undefined();
                return;
            }
            if (a <= 0 && b >= 0) {
                lo[0] = -kInf;
                hi[0] = kInf;
                st = kMayDef | kMayUndef;
                return;
            }
            double ia = 1.0 / b, ib = 1.0 / a;
            if (a == b) ia = ib = 1.0 / a;
            if (nd.kind == NodeKind::Inv) {
                lo[0] = ia;
                hi[0] = ib;
            } else {
                interval_pow(ia, ib, -k, lo[0], hi[0]);
            }
            st = kMayDef | (may_undef ? kMayUndef : 0);
            return;
        }
        case NodeKind::Dist: {
            int sa = kslot(nd.kids[0]), sb = kslot(nd.kids[1]);
            std::uint8_t fa = tri_[sa], fb = tri_[sb];
            if (!(fa & kMayDef) || !(fb & kMayDef)) {
                undefined();
                return;
            }
            double ls = 0, hs = 0;
            for (int i = 0; i < net_.node(nd.kids[0]).type.dim; ++i) {
                double alo = lo_[comp_[sa] + i], ahi = hi_[comp_[sa] + i];
                double blo = lo_[comp_[sb] + i], bhi = hi_[comp_[sb] + i];
                double gap, span;
                if (alo == ahi && blo == bhi) {
                    gap = span = alo - blo;
                } else {
                    gap = std::max({0.0, alo - bhi, blo - ahi});
                    span = std::max(std::fabs(ahi - blo), std::fabs(bhi - alo));
                }
                ls += gap * gap;
                hs += span * span;
            }
            lo[0] = std::sqrt(ls);
            hi[0] = std::sqrt(hs);
            st = kMayDef | (((fa | fb) & kMayUndef) ? kMayUndef : 0);
            return;
        }
        case NodeKind::Loop: {
            if (t == 0) copy_from(net_.slot(nd.kids[0], 0), nd.kids[0]);
            else copy_from(net_.slot(nd.kids[1], net_.node(nd.kids[1]).timed ? t - 1 : 0), nd.kids[1]);
            return;
        }
        case NodeKind::Final: {
            int k = nd.kids[0];
            copy_from(net_.slot(k, net_.node(k).timed ? T - 1 : 0), k);
            return;
        }
    }
}

std::uint64_t MaskState::order_key(int node, int t) const {
    const std::uint64_t n = net_.nodes().size();
    const int phase = net_.node(node).phase;
    if (phase == 0) return static_cast<std::uint64_t>(node);
    if (phase == 1) return n + static_cast<std::uint64_t>(t) * n + node;
    return n + static_cast<std::uint64_t>(net_.iterations()) * n + node;
}

void MaskState::push(int node, int t) {
    int s = net_.slot(node, t);
    if (queued_[s]) return;
    queued_[s] = 1;
    heap_.push_back({order_key(node, t), {node, t}});
    std::push_heap(heap_.begin(), heap_.end(), std::greater<>());
}

void MaskState::push_parents(int node, int t) {
    const NetNode& nd = net_.node(node);
    const int T = net_.iterations();
    for (int p : nd.parents) {
        const NetNode& pn = net_.node(p);
        if (pn.kind == NodeKind::Loop) {
            if (pn.kids[0] == node) push(p, 0);
            if (pn.kids[1] == node) {
                if (!nd.timed) {
                    for (int u = 1; u < T; ++u) push(p, u);
                } else if (t + 1 < T) {
                    push(p, t + 1);
                }
            }
        } else if (pn.kind == NodeKind::Final) {
            if (!nd.timed || t == T - 1) push(p, 0);
        } else if (pn.timed) {
            if (nd.timed) {
                push(p, t);
            } else {
                for (int u = 0; u < T; ++u) push(p, u);
            }
        } else {
            push(p, 0);
        }
    }
}

bool MaskState::recompute(int node, int t) {
    int s = net_.slot(node, t);
    const NetNode& nd = net_.node(node);
    const int d = nd.type.numeric() ? nd.type.dim : 0;
    std::uint8_t st = tri_[s];
    double lo[kMaxDim], hi[kMaxDim];
    compute(node, t, st, lo, hi);
    ++node_updates_;
    bool changed = st != tri_[s];
    for (int i = 0; i < d && !changed; ++i)
        changed = lo[i] != lo_[comp_[s] + i] || hi[i] != hi_[comp_[s] + i];
    if (!changed) return false;
    trail_.push_back({s, tri_[s], static_cast<std::uint32_t>(saved_.size())});
    for (int i = 0; i < d; ++i) {
        saved_.push_back(lo_[comp_[s] + i]);
        saved_.push_back(hi_[comp_[s] + i]);
        lo_[comp_[s] + i] = lo[i];
        hi_[comp_[s] + i] = hi[i];
    }
    bool was_unknown = tri_[s] == 0;
    tri_[s] = st;
    if (d == 0 && was_unknown && st != 0)
        for (int k : slot_targets_[s]) decided_.push_back({k, st == 1});
    return true;
}

void MaskState::drain() {
    while (!heap_.empty()) {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<>());
        auto [node, t] = heap_.back().second;
        heap_.pop_back();
        queued_[net_.slot(node, t)] = 0;
        if (recompute(node, t)) push_parents(node, t);
    }
}

void MaskState::assign(int var, bool value) {
    if (assigned_[var]) throw InternalError("variable assigned twice");
    trail_.push_back({-1 - var, 0, 0});
    assigned_[var] = 1;
    ++assigned_count_;
    ++propagations_;
    int node = net_.var_node(var);
    if (node < 0) return;
    int s = net_.slot(node, 0);
    trail_.push_back({s, tri_[s], static_cast<std::uint32_t>(saved_.size())});
    tri_[s] = value ? 1 : 2;
    for (int k : slot_targets_[s]) decided_.push_back({k, value});
    push_parents(node, 0);
    drain();
}

void MaskState::undo(std::size_t mark) {
    while (trail_.size() > mark) {
        TrailEntry e = trail_.back();
        trail_.pop_back();
        if (e.slot < 0) {
            assigned_[-1 - e.slot] = 0;
            --assigned_count_;
            continue;
        }
        tri_[e.slot] = e.state;
        const NetNode& nd = net_.node(slot_node_[e.slot]);
        const int d = nd.type.numeric() ? nd.type.dim : 0;
        for (int i = 0; i < d; ++i) {
            lo_[comp_[e.slot] + i] = saved_[e.saved + 2 * i];
            hi_[comp_[e.slot] + i] = saved_[e.saved + 2 * i + 1];
        }
        saved_.resize(e.saved);
    }
}

std::vector<std::pair<int, bool>> MaskState::take_decided() {
    std::vector<std::pair<int, bool>> out;
    out.swap(decided_);
    return out;
}

int MaskState::next_variable() const {
    const int m = net_.vars().size();
    std::vector<std::int64_t> count(m, 0);
    const int n = static_cast<int>(net_.nodes().size());
    for (int i = 0; i < n; ++i) {
        int undecided = 0;
        for (int t = 0; t < net_.slots(i); ++t)
            if (!slot_decided(net_.slot(i, t))) ++undecided;
        if (undecided == 0) continue;
        const auto& sup = net_.support(i);
        for (size_t w = 0; w < sup.size(); ++w) {
            std::uint64_t bits = sup[w];
            while (bits) {
                int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                count[w * 64 + b] += undecided;
            }
        }
    }
    int best = -1;
    for (int v = 0; v < m; ++v) {
        if (assigned_[v]) continue;
        if (best < 0 || count[v] > count[best]) best = v;
    }
    return best;
}

bool MaskState::converged_at(int t) const {
    if (t + 1 >= net_.iterations()) return false;
    const int n = static_cast<int>(net_.nodes().size());
    for (int i = 0; i < n; ++i) {
        const NetNode& nd = net_.node(i);
        if (!nd.timed) continue;
        int a = net_.slot(i, t), b = net_.slot(i, t + 1);
        if (tri_[a] != tri_[b]) return false;
        const int d = nd.type.numeric() ? nd.type.dim : 0;
        for (int k = 0; k < d; ++k)
            if (lo_[comp_[a] + k] != lo_[comp_[b] + k] || hi_[comp_[a] + k] != hi_[comp_[b] + k]) return false;
    }
    return true;
}

}  // namespace pwe
