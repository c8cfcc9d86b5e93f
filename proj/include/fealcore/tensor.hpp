#pragma once

#include "error.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace fealcore {

using Index = std::int64_t;

enum class DType { float64, int64, boolean };

template <class T>
struct dtype_of;
template <>
struct dtype_of<double> {
    static constexpr DType value = DType::float64;
};
template <>
struct dtype_of<Index> {
    static constexpr DType value = DType::int64;
};
template <>
struct dtype_of<bool> {
    static constexpr DType value = DType::boolean;
};

/// Dense row-major tensor with a fixed element type.
///
/// Boolean tensors store one byte per element so that spans over the data are
/// well defined (no std::vector<bool> proxy).
template <class T>
class Tensor {
public:
    using value_type = std::conditional_t<std::is_same_v<T, bool>, std::uint8_t, T>;
    using Shape = std::vector<Index>;

    static constexpr DType dtype = dtype_of<T>::value;

    Tensor() = default;

    explicit Tensor(Shape shape, value_type fill = value_type{})
        : shape_(std::move(shape)), data_(checked_numel(shape_), fill)
    {}

    Tensor(Shape shape, std::vector<value_type> data)
        : shape_(std::move(shape)), data_(std::move(data))
    {
        FEALCORE_THROW_IF(checked_numel(shape_) != data_.size(), InvalidArgument,
                          "Tensor: shape holds ", checked_numel(shape_),
                          " elements but data has ", data_.size());
    }

    /// Build a rank-2 tensor from nested rows, e.g. {{0, 1}, {2, 3}}.
    static Tensor from_rows(std::initializer_list<std::initializer_list<value_type>> rows)
    {
        const Index n = static_cast<Index>(rows.size());
        const Index k = n == 0 ? 0 : static_cast<Index>(rows.begin()->size());
        std::vector<value_type> data;
        data.reserve(static_cast<std::size_t>(n * k));
        for (const auto& r : rows) {
            FEALCORE_THROW_IF(static_cast<Index>(r.size()) != k, InvalidArgument,
                              "Tensor::from_rows: ragged rows");
            data.insert(data.end(), r.begin(), r.end());
        }
        return Tensor({n, k}, std::move(data));
    }

    static Tensor vector(std::vector<value_type> data)
    {
        const auto n = static_cast<Index>(data.size());
        return Tensor({n}, std::move(data));
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] Index shape(std::size_t axis) const { return shape_.at(axis); }
    [[nodiscard]] std::size_t ndim() const noexcept { return shape_.size(); }
    [[nodiscard]] Index size() const noexcept { return static_cast<Index>(data_.size()); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] std::span<value_type> data() noexcept { return data_; }
    [[nodiscard]] std::span<const value_type> data() const noexcept { return data_; }
    [[nodiscard]] const std::vector<value_type>& storage() const noexcept { return data_; }

    value_type& operator[](Index i) { return data_[static_cast<std::size_t>(i)]; }
    const value_type& operator[](Index i) const { return data_[static_cast<std::size_t>(i)]; }

    template <class... I>
    value_type& operator()(I... idx)
    {
        return data_[offset(idx...)];
    }
    template <class... I>
    const value_type& operator()(I... idx) const
    {
        return data_[offset(idx...)];
    }

    /// Row r of the tensor viewed as [shape[0], rest].
    [[nodiscard]] std::span<const value_type> row(Index r) const
    {
        const auto w = static_cast<std::size_t>(row_width());
        return std::span<const value_type>(data_).subspan(static_cast<std::size_t>(r) * w, w);
    }
    [[nodiscard]] std::span<value_type> row(Index r)
    {
        const auto w = static_cast<std::size_t>(row_width());
        return std::span<value_type>(data_).subspan(static_cast<std::size_t>(r) * w, w);
    }

    [[nodiscard]] Index row_width() const
    {
        if (shape_.empty()) return 1;
        Index w = 1;
        for (std::size_t a = 1; a < shape_.size(); ++a) w *= shape_[a];
        return w;
    }

    [[nodiscard]] Tensor reshaped(Shape shape) const&
    {
        return Tensor(std::move(shape), data_);
    }
    [[nodiscard]] Tensor reshaped(Shape shape) &&
    {
        return Tensor(std::move(shape), std::move(data_));
    }

    friend bool operator==(const Tensor& a, const Tensor& b)
    {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    static std::size_t checked_numel(const Shape& shape)
    {
        std::size_t n = 1;
        for (Index e : shape) {
            FEALCORE_THROW_IF(e < 0, InvalidArgument, "Tensor: negative extent ", e);
            n *= static_cast<std::size_t>(e);
        }
        return n;
    }

    template <class... I>
    std::size_t offset(I... idx) const
    {
        static_assert((std::is_integral_v<I> && ...));
        const Index ids[] = {static_cast<Index>(idx)...};
        std::size_t off = 0;
        for (std::size_t a = 0; a < sizeof...(I); ++a)
            off = off * static_cast<std::size_t>(shape_[a]) + static_cast<std::size_t>(ids[a]);
        return off;
    }

    Shape shape_;
    std::vector<value_type> data_;
};

using FloatTensor = Tensor<double>;
using IndexTensor = Tensor<Index>;
using BoolTensor = Tensor<bool>;

} // namespace fealcore
