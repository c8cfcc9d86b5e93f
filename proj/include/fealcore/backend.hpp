#pragma once

// Dense-tensor backend contract and its two implementations.
//
// Every module routes its bulk kernels (sorting, deduplication, scatter
// accumulation, per-cell contractions, reductions) through the active Backend,
// so switching between the serial and the thread-parallel implementation is a
// single call on the BackendManager.

#include "error.hpp"
#include "tensor.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fealcore {

enum class BackendId { serial, parallel };

inline std::string_view to_string(BackendId id)
{
    return id == BackendId::serial ? "serial" : "parallel";
}

inline BackendId parse_backend_id(std::string_view name)
{
    if (name == "serial") return BackendId::serial;
    if (name == "parallel") return BackendId::parallel;
    throw InvalidArgument(detail::concat("unknown backend '", name, "' (expected serial|parallel)"));
}

/// Result of Backend::unique_rows.
struct UniqueRows {
    IndexTensor unique;      // [U, K], lexicographic order
    IndexTensor first_index; // [U]
    IndexTensor last_index;  // [U]
    IndexTensor inverse;     // [N]
};

class Backend {
public:
    virtual ~Backend() = default;

    [[nodiscard]] virtual BackendId id() const noexcept = 0;

    /// Run body(begin, end) over a partition of [0, n). Chunks never overlap.
    virtual void parallel_for(Index n, const std::function<void(Index, Index)>& body) const = 0;

    /// Fixed-order accumulation so that both backends agree bitwise.
    [[nodiscard]] bool deterministic() const noexcept { return deterministic_.load(); }
    void set_deterministic(bool on) noexcept { deterministic_.store(on); }

    /// Stable permutation sorting the rows of keys [N, K] by column 0, then 1, ...
    [[nodiscard]] virtual IndexTensor lexsort_rows(const IndexTensor& keys) const = 0;

    [[nodiscard]] UniqueRows unique_rows(const IndexTensor& rows) const;

    /// out[m] = target[m] + sum over i with idx[i] == m of values[i].
    [[nodiscard]] virtual FloatTensor scatter_add(const FloatTensor& target,
                                                  std::span<const Index> idx,
                                                  std::span<const double> values) const = 0;

    /// Einstein summation over the given operands, e.g. "cq,cqik,cqjk->cij".
    /// Contracted labels are summed in row-major order of their extents.
    [[nodiscard]] FloatTensor contract(std::string_view pattern,
                                       std::span<const FloatTensor* const> operands) const;

    [[nodiscard]] FloatTensor contract(std::string_view pattern,
                                       std::initializer_list<const FloatTensor*> operands) const
    {
        return contract(pattern, std::span<const FloatTensor* const>(operands.begin(), operands.size()));
    }

    [[nodiscard]] virtual double dot(std::span<const double> a, std::span<const double> b) const = 0;

protected:
    static constexpr Index k_dot_block = 1024;

    static void check_scatter_indices(Index m, std::span<const Index> idx);
    static void lexsort_range(const IndexTensor& keys, Index begin, Index end, std::span<Index> perm);
    static bool row_less(const IndexTensor& keys, Index a, Index b);

private:
    std::atomic<bool> deterministic_{true};
};

// ---------------------------------------------------------------------------

inline bool Backend::row_less(const IndexTensor& keys, Index a, Index b)
{
    const Index k = keys.shape(1);
    const Index* ra = keys.data().data() + a * k;
    const Index* rb = keys.data().data() + b * k;
    for (Index c = 0; c < k; ++c) {
        if (ra[c] != rb[c]) return ra[c] < rb[c];
    }
    return false;
}

/// Stable lexicographic sort of rows [begin, end) written into perm (same length).
/// Uses LSD counting sort when the key range is compact, else a stable comparison sort.
inline void Backend::lexsort_range(const IndexTensor& keys, Index begin, Index end, std::span<Index> perm)
{
    const Index n = end - begin;
    const Index k = keys.shape(1);
    std::iota(perm.begin(), perm.end(), begin);
    if (n <= 1) return;

    Index lo = keys[begin * k], hi = lo;
    for (Index r = begin; r < end; ++r) {
        for (Index c = 0; c < k; ++c) {
            lo = std::min(lo, keys[r * k + c]);
            hi = std::max(hi, keys[r * k + c]);
        }
    }
    const Index range = hi - lo + 1;
    if (range > 0 && range <= std::max<Index>(4 * n, 1 << 16)) {
        std::vector<Index> count(static_cast<std::size_t>(range) + 1);
        std::vector<Index> tmp(static_cast<std::size_t>(n));
        for (Index c = k - 1; c >= 0; --c) {
            std::fill(count.begin(), count.end(), 0);
            for (Index t = 0; t < n; ++t) ++count[static_cast<std::size_t>(keys[perm[t] * k + c] - lo + 1)];
            for (std::size_t v = 1; v < count.size(); ++v) count[v] += count[v - 1];
            for (Index t = 0; t < n; ++t) {
                const Index r = perm[t];
                tmp[static_cast<std::size_t>(count[static_cast<std::size_t>(keys[r * k + c] - lo)]++)] = r;
            }
            std::copy(tmp.begin(), tmp.end(), perm.begin());
        }
        return;
    }
    std::stable_sort(perm.begin(), perm.end(),
                     [&keys](Index a, Index b) { return row_less(keys, a, b); });
}

inline void Backend::check_scatter_indices(Index m, std::span<const Index> idx)
{
    for (std::size_t i = 0; i < idx.size(); ++i) {
        FEALCORE_THROW_IF(idx[i] < 0 || idx[i] >= m, InvalidArgument,
                          "scatter_add: index ", idx[i], " at position ", i,
                          " is out of range [0, ", m, ")");
    }
}

inline UniqueRows Backend::unique_rows(const IndexTensor& rows) const
{
    const Index n = rows.ndim() == 2 ? rows.shape(0) : 0;
    const Index k = rows.ndim() == 2 ? rows.shape(1) : 0;
    UniqueRows out;
    out.inverse = IndexTensor({n});
    if (n == 0) {
        out.unique = IndexTensor({0, k});
        out.first_index = IndexTensor({0});
        out.last_index = IndexTensor({0});
        return out;
    }
    const IndexTensor perm = lexsort_rows(rows);

    std::vector<Index> starts;
    starts.reserve(static_cast<std::size_t>(n));
    for (Index t = 0; t < n; ++t) {
        if (t == 0 || row_less(rows, perm[t - 1], perm[t])) starts.push_back(t);
    }
    const auto u = static_cast<Index>(starts.size());
    starts.push_back(n);

    out.unique = IndexTensor({u, k});
    out.first_index = IndexTensor({u});
    out.last_index = IndexTensor({u});
    parallel_for(u, [&](Index b, Index e) {
        for (Index g = b; g < e; ++g) {
            const Index s = starts[static_cast<std::size_t>(g)];
            const Index t = starts[static_cast<std::size_t>(g) + 1];
            std::copy_n(rows.data().data() + perm[s] * k, k, out.unique.data().data() + g * k);
            // stability: the group is in ascending input order
            out.first_index[g] = perm[s];
            out.last_index[g] = perm[t - 1];
            for (Index r = s; r < t; ++r) out.inverse[perm[r]] = g;
        }
    });
    return out;
}

namespace detail {

struct ContractionPlan {
    std::vector<std::string> operand_labels;
    std::string output_labels;
    std::string summed_labels;
    std::array<Index, 128> extent{};
};

inline ContractionPlan plan_contraction(std::string_view pattern,
                                        std::span<const FloatTensor* const> operands)
{
    ContractionPlan plan;
    const auto arrow = pattern.find("->");
    FEALCORE_THROW_IF(arrow == std::string_view::npos, InvalidArgument,
                      "contract: pattern '", pattern, "' lacks '->'");
    std::string_view lhs = pattern.substr(0, arrow);
    plan.output_labels = std::string(pattern.substr(arrow + 2));
    std::size_t pos = 0;
    while (true) {
        const auto comma = lhs.find(',', pos);
        plan.operand_labels.emplace_back(lhs.substr(pos, comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    FEALCORE_THROW_IF(plan.operand_labels.size() != operands.size(), InvalidArgument,
                      "contract: pattern '", pattern, "' names ", plan.operand_labels.size(),
                      " operands but ", operands.size(), " were given");

    plan.extent.fill(-1);
    for (std::size_t o = 0; o < operands.size(); ++o) {
        const auto& labels = plan.operand_labels[o];
        FEALCORE_THROW_IF(labels.size() != operands[o]->ndim(), InvalidArgument,
                          "contract: operand ", o, " has rank ", operands[o]->ndim(),
                          " but pattern gives '", labels, "'");
        for (std::size_t a = 0; a < labels.size(); ++a) {
            const auto ch = static_cast<unsigned char>(labels[a]);
            FEALCORE_THROW_IF(ch >= 128, InvalidArgument, "contract: non-ASCII axis label");
            const Index e = operands[o]->shape(a);
            FEALCORE_THROW_IF(plan.extent[ch] >= 0 && plan.extent[ch] != e, InvalidArgument,
                              "contract: axis '", labels[a], "' has extent ", e, " in operand ", o,
                              " but ", plan.extent[ch], " elsewhere");
            plan.extent[ch] = e;
        }
    }
    for (char ch : plan.output_labels) {
        FEALCORE_THROW_IF(plan.extent[static_cast<unsigned char>(ch)] < 0, InvalidArgument,
                          "contract: output axis '", ch, "' does not appear in any operand");
    }
    for (const auto& labels : plan.operand_labels) {
        for (char ch : labels) {
            if (plan.output_labels.find(ch) == std::string::npos &&
                plan.summed_labels.find(ch) == std::string::npos)
                plan.summed_labels.push_back(ch);
        }
    }
    return plan;
}

} // namespace detail

inline FloatTensor Backend::contract(std::string_view pattern,
                                     std::span<const FloatTensor* const> operands) const
{
    const detail::ContractionPlan plan = detail::plan_contraction(pattern, operands);
    const auto ext = [&](char ch) { return plan.extent[static_cast<unsigned char>(ch)]; };

    FloatTensor::Shape out_shape;
    for (char ch : plan.output_labels) out_shape.push_back(ext(ch));
    FloatTensor out(out_shape);

    // per operand: stride of each label (0 when the label is absent)
    const std::size_t nop = operands.size();
    std::vector<std::array<Index, 128>> stride(nop);
    for (std::size_t o = 0; o < nop; ++o) {
        stride[o].fill(0);
        const auto& labels = plan.operand_labels[o];
        Index s = 1;
        for (std::size_t a = labels.size(); a-- > 0;) {
            stride[o][static_cast<unsigned char>(labels[a])] += s;
            s *= operands[o]->shape(a);
        }
    }

    // offsets contributed by each summed-index tuple, enumerated row-major
    Index nsum = 1;
    for (char ch : plan.summed_labels) nsum *= ext(ch);
    std::vector<Index> sum_offset(static_cast<std::size_t>(nsum * static_cast<Index>(nop)), 0);
    {
        std::vector<Index> ctr(plan.summed_labels.size(), 0);
        for (Index t = 0; t < nsum; ++t) {
            for (std::size_t o = 0; o < nop; ++o) {
                Index off = 0;
                for (std::size_t a = 0; a < ctr.size(); ++a)
                    off += ctr[a] * stride[o][static_cast<unsigned char>(plan.summed_labels[a])];
                sum_offset[static_cast<std::size_t>(t * static_cast<Index>(nop)) + o] = off;
            }
            for (std::size_t a = ctr.size(); a-- > 0;) {
                if (++ctr[a] < ext(plan.summed_labels[a])) break;
                ctr[a] = 0;
            }
        }
    }

    const Index nout = out.size();
    const Index lead = plan.output_labels.empty() ? 1 : ext(plan.output_labels[0]);
    const Index inner = lead == 0 ? 0 : nout / lead;
    std::vector<const double*> base(nop);
    for (std::size_t o = 0; o < nop; ++o) base[o] = operands[o]->data().data();

    parallel_for(lead, [&](Index b, Index e) {
        std::vector<Index> ctr(plan.output_labels.size(), 0);
        std::vector<Index> obase(nop);
        for (Index flat = b * inner; flat < e * inner; ++flat) {
            Index rem = flat;
            for (std::size_t a = ctr.size(); a-- > 0;) {
                const Index n = ext(plan.output_labels[a]);
                ctr[a] = rem % n;
                rem /= n;
            }
            for (std::size_t o = 0; o < nop; ++o) {
                Index off = 0;
                for (std::size_t a = 0; a < ctr.size(); ++a)
                    off += ctr[a] * stride[o][static_cast<unsigned char>(plan.output_labels[a])];
                obase[o] = off;
            }
            double acc = 0.0;
            for (Index t = 0; t < nsum; ++t) {
                const Index* so = sum_offset.data() + t * static_cast<Index>(nop);
                double prod = 1.0;
                for (std::size_t o = 0; o < nop; ++o) prod *= base[o][obase[o] + so[o]];
                acc += prod;
            }
            out[flat] = acc;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------

class SerialBackend final : public Backend {
public:
    [[nodiscard]] BackendId id() const noexcept override { return BackendId::serial; }

    void parallel_for(Index n, const std::function<void(Index, Index)>& body) const override
    {
        if (n > 0) body(0, n);
    }

    [[nodiscard]] IndexTensor lexsort_rows(const IndexTensor& keys) const override
    {
        const Index n = keys.ndim() == 2 ? keys.shape(0) : 0;
        IndexTensor perm({n});
        if (n > 0) lexsort_range(keys, 0, n, perm.data());
        return perm;
    }

    [[nodiscard]] FloatTensor scatter_add(const FloatTensor& target, std::span<const Index> idx,
                                          std::span<const double> values) const override
    {
        FEALCORE_THROW_IF(idx.size() != values.size(), InvalidArgument,
                          "scatter_add: ", idx.size(), " indices but ", values.size(), " values");
        check_scatter_indices(target.size(), idx);
        FloatTensor out = target;
        for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] += values[i];
        return out;
    }

    [[nodiscard]] double dot(std::span<const double> a, std::span<const double> b) const override
    {
        FEALCORE_THROW_IF(a.size() != b.size(), InvalidArgument, "dot: length mismatch");
        const auto n = static_cast<Index>(a.size());
        double total = 0.0;
        for (Index s = 0; s < n; s += k_dot_block) {
            double partial = 0.0;
            const Index e = std::min(n, s + k_dot_block);
            for (Index i = s; i < e; ++i) partial += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
            total += partial;
        }
        return total;
    }
};

class ParallelBackend final : public Backend {
public:
    explicit ParallelBackend(unsigned threads = 0)
        : threads_(threads != 0 ? threads : std::max(2u, std::thread::hardware_concurrency()))
    {}

    [[nodiscard]] BackendId id() const noexcept override { return BackendId::parallel; }
    [[nodiscard]] unsigned threads() const noexcept { return threads_; }

    void parallel_for(Index n, const std::function<void(Index, Index)>& body) const override
    {
        if (n <= 0) return;
        const Index chunks = std::min<Index>(threads_, n);
        if (chunks <= 1) {
            body(0, n);
            return;
        }
        std::vector<std::jthread> workers;
        workers.reserve(static_cast<std::size_t>(chunks - 1));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
        for (Index t = 1; t < chunks; ++t) {
            workers.emplace_back([&, t] {
                try {
                    body(t * n / chunks, (t + 1) * n / chunks);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        try {
            body(0, n / chunks);
        } catch (...) {
            errors[0] = std::current_exception();
        }
        workers.clear();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    [[nodiscard]] IndexTensor lexsort_rows(const IndexTensor& keys) const override
    {
        const Index n = keys.ndim() == 2 ? keys.shape(0) : 0;
        IndexTensor perm({n});
        if (n == 0) return perm;
        const Index chunks = std::min<Index>(threads_, std::max<Index>(1, n / 4096));
        std::vector<Index> bounds(static_cast<std::size_t>(chunks) + 1);
        for (Index t = 0; t <= chunks; ++t) bounds[static_cast<std::size_t>(t)] = t * n / chunks;
        parallel_for(chunks, [&](Index b, Index e) {
            for (Index t = b; t < e; ++t) {
                const Index s = bounds[static_cast<std::size_t>(t)];
                const Index f = bounds[static_cast<std::size_t>(t) + 1];
                lexsort_range(keys, s, f, perm.data().subspan(static_cast<std::size_t>(s),
                                                              static_cast<std::size_t>(f - s)));
            }
        });
        // pairwise stable merges; ties resolve to the left run, which holds smaller input rows
        std::vector<Index> tmp(static_cast<std::size_t>(n));
        auto* src = perm.data().data();
        auto* dst = tmp.data();
        while (bounds.size() > 2) {
            std::vector<Index> next{0};
            const auto runs = static_cast<Index>(bounds.size()) - 1;
            parallel_for((runs + 1) / 2, [&](Index b, Index e) {
                for (Index p = b; p < e; ++p) {
                    const Index l0 = bounds[static_cast<std::size_t>(2 * p)];
                    const Index l1 = bounds[static_cast<std::size_t>(std::min(2 * p + 1, runs))];
                    const Index r1 = bounds[static_cast<std::size_t>(std::min(2 * p + 2, runs))];
                    std::merge(src + l0, src + l1, src + l1, src + r1, dst + l0,
                               [&keys](Index a, Index c) { return row_less(keys, a, c); });
                }
            });
            for (Index p = 0; 2 * p < runs; ++p)
                next.push_back(bounds[static_cast<std::size_t>(std::min(2 * p + 2, runs))]);
            bounds = std::move(next);
            std::swap(src, dst);
        }
        if (src != perm.data().data()) std::copy(src, src + n, perm.data().data());
        return perm;
    }

    [[nodiscard]] FloatTensor scatter_add(const FloatTensor& target, std::span<const Index> idx,
                                          std::span<const double> values) const override
    {
        FEALCORE_THROW_IF(idx.size() != values.size(), InvalidArgument,
                          "scatter_add: ", idx.size(), " indices but ", values.size(), " values");
        const Index m = target.size();
        check_scatter_indices(m, idx);
        FloatTensor out = target;
        const auto l = static_cast<Index>(idx.size());
        if (l == 0) return out;

        if (deterministic()) {
            // bucket inputs by destination, preserving input order inside each bucket
            std::vector<Index> start(static_cast<std::size_t>(m) + 1, 0);
            for (Index i : idx) ++start[static_cast<std::size_t>(i) + 1];
            for (Index r = 0; r < m; ++r) start[static_cast<std::size_t>(r) + 1] += start[static_cast<std::size_t>(r)];
            std::vector<Index> order(static_cast<std::size_t>(l));
            std::vector<Index> fill(start.begin(), start.end() - 1);
            for (Index i = 0; i < l; ++i)
                order[static_cast<std::size_t>(fill[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]++)] = i;
            parallel_for(m, [&](Index b, Index e) {
                for (Index r = b; r < e; ++r) {
                    double acc = out[r];
                    for (Index t = start[static_cast<std::size_t>(r)]; t < start[static_cast<std::size_t>(r) + 1]; ++t)
                        acc += values[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];
                    out[r] = acc;
                }
            });
            return out;
        }

        const Index chunks = std::min<Index>(threads_, l);
        std::vector<std::vector<double>> partial(static_cast<std::size_t>(chunks));
        parallel_for(chunks, [&](Index b, Index e) {
            for (Index t = b; t < e; ++t) {
                auto& buf = partial[static_cast<std::size_t>(t)];
                buf.assign(static_cast<std::size_t>(m), 0.0);
                for (Index i = t * l / chunks; i < (t + 1) * l / chunks; ++i)
                    buf[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] += values[static_cast<std::size_t>(i)];
            }
        });
        for (const auto& buf : partial)
            for (Index r = 0; r < m; ++r) out[r] += buf[static_cast<std::size_t>(r)];
        return out;
    }

    [[nodiscard]] double dot(std::span<const double> a, std::span<const double> b) const override
    {
        FEALCORE_THROW_IF(a.size() != b.size(), InvalidArgument, "dot: length mismatch");
        const auto n = static_cast<Index>(a.size());
        if (deterministic()) {
            const Index blocks = (n + k_dot_block - 1) / k_dot_block;
            std::vector<double> partial(static_cast<std::size_t>(blocks));
            parallel_for(blocks, [&](Index bb, Index be) {
                for (Index blk = bb; blk < be; ++blk) {
                    double p = 0.0;
                    const Index e = std::min(n, (blk + 1) * k_dot_block);
                    for (Index i = blk * k_dot_block; i < e; ++i)
                        p += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
                    partial[static_cast<std::size_t>(blk)] = p;
                }
            });
            double total = 0.0;
            for (double p : partial) total += p;
            return total;
        }
        const Index chunks = std::min<Index>(threads_, std::max<Index>(1, n));
        std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
        parallel_for(chunks, [&](Index t0, Index t1) {
            for (Index t = t0; t < t1; ++t) {
                double p = 0.0;
                for (Index i = t * n / chunks; i < (t + 1) * n / chunks; ++i)
                    p += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
                partial[static_cast<std::size_t>(t)] = p;
            }
        });
        double total = 0.0;
        for (double p : partial) total += p;
        return total;
    }

private:
    unsigned threads_;
};

// ---------------------------------------------------------------------------

/// Router to the active backend. One backend is active at a time; switching is explicit.
class BackendManager {
public:
    static BackendManager& instance()
    {
        static BackendManager manager;
        return manager;
    }

    void set_backend(BackendId id) noexcept { active_.store(id); }
    [[nodiscard]] BackendId active() const noexcept { return active_.load(); }

    [[nodiscard]] Backend& current() noexcept { return get(active()); }
    [[nodiscard]] Backend& get(BackendId id) noexcept
    {
        return id == BackendId::serial ? static_cast<Backend&>(serial_) : static_cast<Backend&>(parallel_);
    }

    void set_deterministic(bool on) noexcept
    {
        serial_.set_deterministic(on);
        parallel_.set_deterministic(on);
    }

private:
    BackendManager() = default;

    SerialBackend serial_;
    ParallelBackend parallel_;
    std::atomic<BackendId> active_{BackendId::serial};
};

inline Backend& bm() noexcept { return BackendManager::instance().current(); }

/// Backend named by a CLI flag if given, else by FEALCORE_BACKEND, else serial.
inline BackendId resolve_backend(const std::optional<std::string>& flag)
{
    if (flag && !flag->empty()) return parse_backend_id(*flag);
    if (const char* env = std::getenv("FEALCORE_BACKEND"); env != nullptr && *env != '\0')
        return parse_backend_id(env);
    return BackendId::serial;
}

/// Restores the previously active backend on scope exit.
class ScopedBackend {
public:
    explicit ScopedBackend(BackendId id) : previous_(BackendManager::instance().active())
    {
        BackendManager::instance().set_backend(id);
    }
    ~ScopedBackend() { BackendManager::instance().set_backend(previous_); }
    ScopedBackend(const ScopedBackend&) = delete;
    ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
    BackendId previous_;
};

} // namespace fealcore
