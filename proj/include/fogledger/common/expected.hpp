#pragma once

// Minimal value-or-error carrier with the subset of the std::expected
// interface used in this code base (the toolchain predates <expected>).

#include <stdexcept>
#include <utility>
#include <variant>

namespace fogledger {

template <class E>
struct Unexpected {
    E error;
};

template <class E>
Unexpected<E> unexpected(E e) {
    return Unexpected<E>{std::move(e)};
}

class BadExpectedAccess : public std::logic_error {
public:
    BadExpectedAccess() : std::logic_error("expected holds an error") {}
};

template <class T, class E>
class Expected {
public:
    Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Expected(Unexpected<E> err) : v_(std::in_place_index<1>, std::move(err.error)) {}

    bool has_value() const { return v_.index() == 0; }
    explicit operator bool() const { return has_value(); }

    T& value() & {
        if (!has_value()) throw BadExpectedAccess();
        return std::get<0>(v_);
    }
    const T& value() const& {
        if (!has_value()) throw BadExpectedAccess();
        return std::get<0>(v_);
    }
    T&& value() && {
        if (!has_value()) throw BadExpectedAccess();
        return std::get<0>(std::move(v_));
    }
    const E& error() const {
        if (has_value()) throw std::logic_error("expected holds a value");
        return std::get<1>(v_);
    }

    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }
    T& operator*() { return value(); }
    const T& operator*() const { return value(); }

private:
    std::variant<T, E> v_;
};

}  // namespace fogledger
