#ifndef SYSMODEL_STREAMS_HPP
#define SYSMODEL_STREAMS_HPP

// Finite streams (sequences), stacks and FIFO buffers.  Infinite streams
// never appear at runtime: every stream is a finite prefix, and clients that
// model unbounded behavior carry an explicit horizon.

#include "sysmodel/values.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <vector>

namespace sysmodel {

template <class T>
using Stream = std::vector<T>;

template <class T>
Stream<T> concat(const Stream<T>& a, const Stream<T>& b) {
    Stream<T> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// First n elements (fewer when the stream is shorter).
template <class T>
Stream<T> take(const Stream<T>& s, std::size_t n) {
    return Stream<T>(s.begin(), s.begin() + std::min(n, s.size()));
}

template <class T, class Pred>
Stream<T> filterBy(const Pred& p, const Stream<T>& s) {
    Stream<T> out;
    for (const auto& x : s)
        if (p(x)) out.push_back(x);
    return out;
}

template <class T, class Pred>
std::size_t countBy(const Pred& p, const Stream<T>& s) {
    return filterBy(p, s).size();
}

template <class U, class T, class Fn>
Stream<U> mapOver(const Fn& f, const Stream<T>& s) {
    Stream<U> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(f(x));
    return out;
}

template <class T>
bool isPrefix(const Stream<T>& a, const Stream<T>& b) {
    if (a.size() > b.size()) return false;
    return std::equal(a.begin(), a.end(), b.begin());
}

template <class T>
const T& fst(const Stream<T>& s) {
    if (s.empty()) throw Error("fst of empty stream");
    return s.front();
}

template <class T>
Stream<T> rst(const Stream<T>& s) {
    if (s.empty()) throw Error("rst of empty stream");
    return Stream<T>(s.begin() + 1, s.end());
}

// LIFO stack; top is the back.
template <class T>
class StackOf {
public:
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    void push(T v) { items_.push_back(std::move(v)); }
    T pop() {
        if (items_.empty()) throw Error("pop of empty stack");
        T v = std::move(items_.back());
        items_.pop_back();
        return v;
    }
    const T& top() const {
        if (items_.empty()) throw Error("top of empty stack");
        return items_.back();
    }
    // Replace the top element.
    void update(T v) {
        if (items_.empty()) throw Error("update of empty stack");
        items_.back() = std::move(v);
    }

    // Bottom-to-top view.
    const std::vector<T>& items() const { return items_; }
    std::vector<T>& items() { return items_; }

    friend bool operator==(const StackOf& a, const StackOf& b) { return a.items_ == b.items_; }
    friend bool operator!=(const StackOf& a, const StackOf& b) { return !(a == b); }

private:
    std::vector<T> items_;
};

// FIFO buffer with positional removal (consumers may match anywhere, not
// just at the head).
template <class T>
class BufferOf {
public:
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }

    const T& fst() const {
        if (items_.empty()) throw Error("fst of empty buffer");
        return items_.front();
    }
    BufferOf rst() const {
        if (items_.empty()) throw Error("rst of empty buffer");
        BufferOf out = *this;
        out.items_.erase(out.items_.begin());
        return out;
    }
    void addFirst(T v) { items_.insert(items_.begin(), std::move(v)); }
    void addLast(T v) { items_.push_back(std::move(v)); }
    void removeAt(std::size_t i) {
        if (i >= items_.size()) throw Error("buffer removeAt out of range");
        items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(i));
    }

    static BufferOf concat(const BufferOf& a, const BufferOf& b) {
        BufferOf out = a;
        out.items_.insert(out.items_.end(), b.items_.begin(), b.items_.end());
        return out;
    }

    const std::vector<T>& items() const { return items_; }

    friend bool operator==(const BufferOf& a, const BufferOf& b) { return a.items_ == b.items_; }
    friend bool operator!=(const BufferOf& a, const BufferOf& b) { return !(a == b); }

private:
    std::vector<T> items_;
};

} // namespace sysmodel

#endif
