#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kdvsym/error.hpp"

namespace kdvsym {

enum class CoordKind { independent, dependent, derivative, other };

// Ordered, named coordinates. Index order is the chart order used for
// monomial ordering, form index tuples and rendering.
class CoordChart {
public:
    CoordChart(std::vector<std::string> names, std::vector<CoordKind> kinds)
        : names_(std::move(names)), kinds_(std::move(kinds)) {
        if (kinds_.empty()) kinds_.assign(names_.size(), CoordKind::other);
        if (kinds_.size() != names_.size()) throw Error("coordinate kinds do not match names");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], i).second)
                throw Error("duplicate coordinate name '" + names_[i] + "'");
        }
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    CoordKind kind(std::size_t i) const { return kinds_.at(i); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::optional<std::size_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index(const std::string& name) const {
        auto found = find(name);
        if (!found) throw UnknownCoordinate(name);
        return *found;
    }

    bool operator==(const CoordChart& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::vector<CoordKind> kinds_;
    std::unordered_map<std::string, std::size_t> index_;
};

using ChartPtr = std::shared_ptr<const CoordChart>;

inline ChartPtr make_chart(std::vector<std::string> names, std::vector<CoordKind> kinds = {}) {
    return std::make_shared<const CoordChart>(std::move(names), std::move(kinds));
}

inline bool same_chart(const ChartPtr& a, const ChartPtr& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (!same_chart(a, b)) throw ChartMismatch();
}

}  // namespace kdvsym
