#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wmterrain/error.hpp"

namespace wmterrain {

/// Square, row-major grid of values. Row index i grows along +y,
/// column index j along +x.
template<typename T>
class Grid
{
public:
    using value_type = T;

    Grid() = default;

    explicit Grid(std::size_t size, T fill = T{})
        : size_(size), data_(size * size, fill)
    {
    }

    Grid(std::size_t size, std::vector<T> values)
        : size_(size), data_(std::move(values))
    {
        if (data_.size() != size_ * size_)
            throw SizeMismatchError("grid data does not match size*size");
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t count() const noexcept { return data_.size(); }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * size_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * size_ + j]; }

    T& operator[](std::size_t k) noexcept { return data_[k]; }
    const T& operator[](std::size_t k) const noexcept { return data_[k]; }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * size_, size_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * size_, size_}; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool operator==(const Grid&) const = default;

private:
    std::size_t size_ = 0;
    std::vector<T> data_;
};

} // namespace wmterrain
