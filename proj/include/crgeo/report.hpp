#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crgeo/expr.hpp"

namespace crgeo {

/// One verified identity: the worst residual over a sample set.
struct CheckEntry {
    std::string name;
    std::string anchor;  // where the identity comes from, in words
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::size_t samples = 0;
    std::optional<Point> worst;
    std::string note;
    /// False when the identity's hypotheses fail; the entry is then reported
    /// but not asserted (pass stays true).
    bool applicable = true;

    void mark_not_applicable(std::string why) {
        applicable = false;
        pass = true;
        note = std::move(why);
    }
};

struct CheckList {
    std::vector<CheckEntry> entries;

    bool pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
    const CheckEntry* find(const std::string& name) const {
        for (const auto& e : entries)
            if (e.name == name) return &e;
        return nullptr;
    }
    void append(const CheckList& other) { entries.insert(entries.end(), other.entries.begin(), other.entries.end()); }
};

/// Running max of |residual| with the point that produced it. NaN counts as +inf.
struct MaxResidual {
    double value = 0.0;
    std::optional<Point> where;
    std::size_t count = 0;

    void add(double r, const Point& p) {
        ++count;
        const double a = std::isnan(r) ? INFINITY : std::abs(r);
        if (!where || a > value) {
            value = a;
            where = p;
        }
    }
    void merge(const MaxResidual& o) {
        count += o.count;
        if (o.where && (!where || o.value > value)) {
            value = o.value;
            where = o.where;
        }
    }

    /// An entry that fails when r > tolerance, or when nothing was evaluated.
    CheckEntry entry(std::string name, std::string anchor, double tolerance) const {
        CheckEntry e;
        e.name = std::move(name);
        e.anchor = std::move(anchor);
        e.residual = value;
        e.tolerance = tolerance;
        e.samples = count;
        e.worst = where;
        e.pass = count > 0 && value <= tolerance;
        return e;
    }
};

/// Worker count: CRGEO_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Calls fn(i) for i in [0, n) on up to thread_count() threads. Each index is
/// handled by exactly one call; callers write into per-index slots and reduce
/// afterwards in index order, so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace crgeo
