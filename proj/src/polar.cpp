#include "odma_ura/polar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace odma_ura::polar {

std::vector<int> reliability_order(int n_c)
{
    if (n_c <= 0 || n_c > 1024 || !std::has_single_bit(static_cast<unsigned>(n_c)))
        throw std::invalid_argument("polar block length must be a power of two no larger than 1024");
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n_c));
    for (auto idx : kNrReliabilitySequence)
        if (idx < n_c)
            order.push_back(idx);
    return order;
}

std::uint32_t crc_polynomial(int r)
{
    switch (r) {
    case 0: return 0;
    case 8: return 0x07;
    case 16: return 0x1021;
    case 24: return 0x864CFB;
    default: throw std::invalid_argument("unsupported CRC length " + std::to_string(r));
    }
}

PolarCode::PolarCode(int n_c, int k, int crc_len)
    : n_(n_c), k_(k), log2n_(0), crc_len_(crc_len), crc_poly_(crc_polynomial(crc_len))
{
    if (k < 0 || k > n_c)
        throw std::invalid_argument("polar code needs 0 <= k <= n_c");
    if (crc_len > k)
        throw std::invalid_argument("CRC longer than the information word");
    const auto order = reliability_order(n_c);
    log2n_ = std::countr_zero(static_cast<unsigned>(n_c));

    frozen_.assign(order.begin(), order.begin() + (n_c - k));
    std::sort(frozen_.begin(), frozen_.end());
    frozen_mask_.assign(static_cast<std::size_t>(n_c), 0);
    for (int i : frozen_)
        frozen_mask_[static_cast<std::size_t>(i)] = 1;
    info_.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < n_c; ++i)
        if (!frozen_mask_[static_cast<std::size_t>(i)])
            info_.push_back(i);
}

PolarCode construct(int n_c, int k, int crc_len) { return PolarCode(n_c, k, crc_len); }

BitVector crc(std::span<const std::uint8_t> bits, int r)
{
    BitVector out(static_cast<std::size_t>(r), 0);
    if (r == 0)
        return out;
    const std::uint32_t poly = crc_polynomial(r);
    const std::uint32_t mask = (r == 32) ? 0xffffffffu : ((1u << r) - 1u);
    std::uint32_t reg = 0;
    for (std::uint8_t b : bits) {
        const std::uint32_t top = ((reg >> (r - 1)) & 1u) ^ (b & 1u);
        reg = (reg << 1) & mask;
        if (top)
            reg ^= poly;
    }
    for (int i = 0; i < r; ++i)
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((reg >> (r - 1 - i)) & 1u);
    return out;
}

BitVector crc_append(std::span<const std::uint8_t> msg, const PolarCode& code)
{
    if (static_cast<int>(msg.size()) != code.message_len())
        throw std::invalid_argument("crc_append: message length does not match the code");
    BitVector out(msg.begin(), msg.end());
    const auto parity = crc(msg, code.crc_len());
    out.insert(out.end(), parity.begin(), parity.end());
    return out;
}

bool crc_check(std::span<const std::uint8_t> bits_with_crc, const PolarCode& code)
{
    const auto r = static_cast<std::size_t>(code.crc_len());
    if (bits_with_crc.size() < r)
        return false;
    const auto split = bits_with_crc.size() - r;
    const auto expected = crc(bits_with_crc.first(split), code.crc_len());
    return std::equal(expected.begin(), expected.end(), bits_with_crc.begin() + static_cast<std::ptrdiff_t>(split));
}

void polar_transform(std::span<std::uint8_t> u)
{
    const std::size_t n = u.size();
    for (std::size_t h = 1; h < n; h *= 2)
        for (std::size_t i = 0; i < n; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j)
                u[j] ^= u[j + h];
}

BitVector encode(std::span<const std::uint8_t> info, const PolarCode& code)
{
    if (static_cast<int>(info.size()) != code.k())
        throw std::invalid_argument("encode: info length does not match k");
    BitVector x(static_cast<std::size_t>(code.n()), 0);
    const auto& pos = code.info_set();
    for (std::size_t i = 0; i < pos.size(); ++i)
        x[static_cast<std::size_t>(pos[i])] = info[i] & 1u;
    polar_transform(x);
    return x;
}

namespace {

inline double f_minsum(double a, double b)
{
    const double m = std::min(std::abs(a), std::abs(b));
    return (std::signbit(a) != std::signbit(b)) ? -m : m;
}

inline double penalty(double llr, std::uint8_t bit)
{
    return ((bit == 0) == (llr < 0.0)) ? std::abs(llr) : 0.0;
}

// LLR-based SCL with per-layer copy-on-write arrays (Tal-Vardy bookkeeping).
// Depth d in [1, m] holds, per array slot, the node LLRs (size n >> d) and the
// codeword of the last completed left child at that depth.
class SclDecoder {
public:
    SclDecoder(const PolarCode& code, int list_size)
        : code_(code), n_(code.n()), m_(code.log2n()), L_(list_size), k_(code.k()), crc_len_(code.crc_len())
    {
        layers_.resize(static_cast<std::size_t>(m_) + 1);
        for (int d = 1; d <= m_; ++d) {
            auto& layer = layers_[static_cast<std::size_t>(d)];
            layer.len = static_cast<std::size_t>(n_) >> d;
            layer.llr.assign(layer.len * static_cast<std::size_t>(L_), 0.0);
            layer.left.assign(layer.len * static_cast<std::size_t>(L_), 0);
        }
        decisions_.assign(static_cast<std::size_t>(L_), BitVector(static_cast<std::size_t>(n_), 0));
        scratch_.assign(static_cast<std::size_t>(n_), 0);
        scratch2_.assign(static_cast<std::size_t>(n_), 0);
        forks_.reserve(2 * static_cast<std::size_t>(L_));
        keep_.resize(static_cast<std::size_t>(L_));
        fork_metric_.resize(static_cast<std::size_t>(L_));
    }

    bool matches(const PolarCode& code, int list_size) const
    {
        return &code == &code_ && code.n() == n_ && code.k() == k_ && code.crc_len() == crc_len_ &&
               list_size == L_;
    }

    std::optional<BitVector> run(std::span<const double> llrs)
    {
        reset();
        root_ = llrs;
        if (n_ == 1) {
            // Degenerate length-1 code: single leaf directly on the channel LLR.
            return decide_trivial();
        }
        const int first = new_path();
        for (int d = 1; d <= m_; ++d) {
            auto& layer = layers_[static_cast<std::size_t>(d)];
            const int s = layer.free.back();
            layer.free.pop_back();
            layer.refcount[static_cast<std::size_t>(s)] = 1;
            layer.path_slot[static_cast<std::size_t>(first)] = s;
        }

        for (int phi = 0; phi < n_; ++phi) {
            update_llrs(phi);
            if (code_.is_frozen(phi))
                decide_frozen(phi);
            else
                decide_info(phi);
            propagate_bits(phi);
        }
        return select_output();
    }

private:
    struct Layer {
        std::size_t len = 0;
        std::vector<double> llr;
        std::vector<std::uint8_t> left;
        std::vector<int> refcount;
        std::vector<int> free;
        std::vector<int> path_slot;
    };

    struct Fork {
        double metric;
        int path;
        std::uint8_t bit;
    };

    const PolarCode& code_;
    int n_;
    int m_;
    int L_;
    int k_;
    int crc_len_;
    std::span<const double> root_;
    std::vector<Layer> layers_;
    std::vector<double> metric_;
    std::vector<std::uint8_t> active_;
    std::vector<BitVector> decisions_;
    std::vector<int> free_paths_;
    BitVector scratch_;
    BitVector scratch2_;
    std::vector<int> clones_;
    std::vector<Fork> forks_;
    std::vector<std::array<bool, 2>> keep_;
    std::vector<std::array<double, 2>> fork_metric_;

    void reset()
    {
        for (int d = 1; d <= m_; ++d) {
            auto& layer = layers_[static_cast<std::size_t>(d)];
            layer.refcount.assign(static_cast<std::size_t>(L_), 0);
            layer.path_slot.assign(static_cast<std::size_t>(L_), -1);
            layer.free.clear();
            for (int s = L_ - 1; s >= 0; --s)
                layer.free.push_back(s);
        }
        metric_.assign(static_cast<std::size_t>(L_), 0.0);
        active_.assign(static_cast<std::size_t>(L_), 0);
        free_paths_.clear();
        for (int l = L_ - 1; l >= 0; --l)
            free_paths_.push_back(l);
        clones_.clear();
    }

    int new_path()
    {
        const int l = free_paths_.back();
        free_paths_.pop_back();
        active_[static_cast<std::size_t>(l)] = 1;
        metric_[static_cast<std::size_t>(l)] = 0.0;
        return l;
    }

    int clone_path(int l)
    {
        const int c = new_path();
        for (int d = 1; d <= m_; ++d) {
            auto& layer = layers_[static_cast<std::size_t>(d)];
            const int s = layer.path_slot[static_cast<std::size_t>(l)];
            layer.path_slot[static_cast<std::size_t>(c)] = s;
            ++layer.refcount[static_cast<std::size_t>(s)];
        }
        metric_[static_cast<std::size_t>(c)] = metric_[static_cast<std::size_t>(l)];
        decisions_[static_cast<std::size_t>(c)] = decisions_[static_cast<std::size_t>(l)];
        return c;
    }

    void kill_path(int l)
    {
        active_[static_cast<std::size_t>(l)] = 0;
        free_paths_.push_back(l);
        for (int d = 1; d <= m_; ++d) {
            auto& layer = layers_[static_cast<std::size_t>(d)];
            const int s = layer.path_slot[static_cast<std::size_t>(l)];
            if (--layer.refcount[static_cast<std::size_t>(s)] == 0)
                layer.free.push_back(s);
        }
    }

    int readable(int d, int l) const
    {
        return layers_[static_cast<std::size_t>(d)].path_slot[static_cast<std::size_t>(l)];
    }

    // Exclusive slot for path l at depth d. Contents of a fresh slot are only
    // copied where the caller reads them back (the left codeword before a g-step).
    int writable(int d, int l, bool keep_left = false)
    {
        auto& layer = layers_[static_cast<std::size_t>(d)];
        const int s = layer.path_slot[static_cast<std::size_t>(l)];
        if (layer.refcount[static_cast<std::size_t>(s)] == 1)
            return s;
        const int t = layer.free.back();
        layer.free.pop_back();
        if (keep_left) {
            const auto len = static_cast<std::ptrdiff_t>(layer.len);
            std::copy_n(layer.left.begin() + s * len, len, layer.left.begin() + t * len);
        }
        --layer.refcount[static_cast<std::size_t>(s)];
        layer.refcount[static_cast<std::size_t>(t)] = 1;
        layer.path_slot[static_cast<std::size_t>(l)] = t;
        return t;
    }

    const double* parent_llr(int d, int l) const
    {
        if (d == 1)
            return root_.data();
        const auto& parent = layers_[static_cast<std::size_t>(d - 1)];
        return parent.llr.data() + static_cast<std::size_t>(readable(d - 1, l)) * parent.len;
    }

    void update_llrs(int phi)
    {
        const int start = (phi == 0) ? 1 : m_ - std::countr_zero(static_cast<unsigned>(phi));
        for (int l = 0; l < L_; ++l) {
            if (!active_[static_cast<std::size_t>(l)])
                continue;
            for (int d = start; d <= m_; ++d) {
                auto& layer = layers_[static_cast<std::size_t>(d)];
                const std::size_t h = layer.len;
                const double* parent = parent_llr(d, l);
                const bool g_step = d == start && phi != 0;
                const auto s = static_cast<std::size_t>(writable(d, l, g_step));
                double* out = layer.llr.data() + s * h;
                if (g_step) {
                    const std::uint8_t* left = layer.left.data() + s * h;
                    for (std::size_t j = 0; j < h; ++j)
                        out[j] = parent[j + h] + (1.0 - 2.0 * left[j]) * parent[j];
                } else {
                    for (std::size_t j = 0; j < h; ++j)
                        out[j] = f_minsum(parent[j], parent[j + h]);
                }
            }
        }
    }

    double leaf_llr(int l) const
    {
        const auto& leaf = layers_[static_cast<std::size_t>(m_)];
        return leaf.llr[static_cast<std::size_t>(readable(m_, l))];
    }

    void decide_frozen(int phi)
    {
        for (int l = 0; l < L_; ++l) {
            if (!active_[static_cast<std::size_t>(l)])
                continue;
            metric_[static_cast<std::size_t>(l)] += penalty(leaf_llr(l), 0);
            decisions_[static_cast<std::size_t>(l)][static_cast<std::size_t>(phi)] = 0;
        }
    }

    void decide_info(int phi)
    {
        auto& forks = forks_;
        forks.clear();
        for (int l = 0; l < L_; ++l) {
            if (!active_[static_cast<std::size_t>(l)])
                continue;
            const double llr = leaf_llr(l);
            const double base = metric_[static_cast<std::size_t>(l)];
            forks.push_back({base + penalty(llr, 0), l, 0});
            forks.push_back({base + penalty(llr, 1), l, 1});
        }
        if (forks.size() > static_cast<std::size_t>(L_)) {
            auto better = [](const Fork& a, const Fork& b) {
                if (a.metric != b.metric)
                    return a.metric < b.metric;
                if (a.path != b.path)
                    return a.path < b.path;
                return a.bit < b.bit;
            };
            std::nth_element(forks.begin(), forks.begin() + (L_ - 1), forks.end(), better);
            forks.resize(static_cast<std::size_t>(L_));
        }

        auto& keep = keep_;
        auto& fork_metric = fork_metric_;
        std::fill(keep.begin(), keep.end(), std::array<bool, 2>{false, false});
        for (const auto& f : forks) {
            keep[static_cast<std::size_t>(f.path)][f.bit] = true;
            fork_metric[static_cast<std::size_t>(f.path)][f.bit] = f.metric;
        }
        for (int l = 0; l < L_; ++l) {
            const auto& k = keep[static_cast<std::size_t>(l)];
            if (active_[static_cast<std::size_t>(l)] && !k[0] && !k[1])
                kill_path(l);
        }
        for (int l = 0; l < L_; ++l) {
            if (!active_[static_cast<std::size_t>(l)])
                continue;
            const auto& k = keep[static_cast<std::size_t>(l)];
            const auto& fm = fork_metric[static_cast<std::size_t>(l)];
            if (k[0] && k[1]) {
                // Clones are only created for paths that existed before this leaf.
                const int c = clone_path(l);
                metric_[static_cast<std::size_t>(c)] = fm[1];
                decisions_[static_cast<std::size_t>(c)][static_cast<std::size_t>(phi)] = 1;
                clones_.push_back(c);
                metric_[static_cast<std::size_t>(l)] = fm[0];
                decisions_[static_cast<std::size_t>(l)][static_cast<std::size_t>(phi)] = 0;
            } else if (!is_clone(l)) {
                const std::uint8_t bit = k[0] ? 0 : 1;
                metric_[static_cast<std::size_t>(l)] = fm[bit];
                decisions_[static_cast<std::size_t>(l)][static_cast<std::size_t>(phi)] = bit;
            }
        }
        clones_.clear();
    }

    bool is_clone(int l) const { return std::find(clones_.begin(), clones_.end(), l) != clones_.end(); }

    void propagate_bits(int phi)
    {
        for (int l = 0; l < L_; ++l) {
            if (!active_[static_cast<std::size_t>(l)])
                continue;
            const std::uint8_t u = decisions_[static_cast<std::size_t>(l)][static_cast<std::size_t>(phi)];
            if ((phi & 1) == 0) {
                auto& leaf = layers_[static_cast<std::size_t>(m_)];
                leaf.left[static_cast<std::size_t>(writable(m_, l))] = u;
                continue;
            }
            // Right leaf: fold completed right subtrees into their parents.
            std::uint8_t* cur = scratch_.data();
            std::uint8_t* next = scratch2_.data();
            cur[0] = u;
            std::size_t h = 1;
            int d = m_;
            while (d >= 1 && ((phi >> (m_ - d)) & 1)) {
                const auto& layer = layers_[static_cast<std::size_t>(d)];
                const std::uint8_t* left = layer.left.data() + static_cast<std::size_t>(readable(d, l)) * h;
                for (std::size_t j = 0; j < h; ++j) {
                    next[j] = left[j] ^ cur[j];
                    next[j + h] = cur[j];
                }
                std::swap(cur, next);
                h *= 2;
                --d;
            }
            if (d >= 1) {
                auto& layer = layers_[static_cast<std::size_t>(d)];
                const auto s = static_cast<std::size_t>(writable(d, l));
                std::copy_n(cur, h, layer.left.data() + s * h);
            }
        }
    }

    std::optional<BitVector> select_output() const
    {
        std::vector<int> order;
        for (int l = 0; l < L_; ++l)
            if (active_[static_cast<std::size_t>(l)])
                order.push_back(l);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return metric_[static_cast<std::size_t>(a)] < metric_[static_cast<std::size_t>(b)];
        });
        BitVector info(static_cast<std::size_t>(code_.k()));
        for (int l : order) {
            const auto& u = decisions_[static_cast<std::size_t>(l)];
            for (std::size_t i = 0; i < info.size(); ++i)
                info[i] = u[static_cast<std::size_t>(code_.info_set()[i])];
            if (crc_check(info, code_))
                return info;
        }
        return std::nullopt;
    }

    std::optional<BitVector> decide_trivial() const
    {
        BitVector info;
        if (code_.k() == 1)
            info.push_back(root_[0] < 0.0 ? 1 : 0);
        if (crc_check(info, code_))
            return info;
        return std::nullopt;
    }
};

}  // namespace

std::optional<BitVector> scl_decode_info(std::span<const double> llrs, const PolarCode& code, int list_size)
{
    if (static_cast<int>(llrs.size()) != code.n())
        throw std::invalid_argument("scl_decode: LLR length does not match n_c");
    if (list_size < 1)
        throw std::invalid_argument("scl_decode: list size must be positive");
    // One decoder per thread, rebuilt only when the code or list size changes.
    thread_local std::unique_ptr<SclDecoder> decoder;
    if (!decoder || !decoder->matches(code, list_size))
        decoder = std::make_unique<SclDecoder>(code, list_size);
    return decoder->run(llrs);
}

std::optional<BitVector> scl_decode(std::span<const double> llrs, const PolarCode& code, int list_size)
{
    auto info = scl_decode_info(llrs, code, list_size);
    if (!info)
        return std::nullopt;
    info->resize(static_cast<std::size_t>(code.message_len()));
    return info;
}

}  // namespace odma_ura::polar
