#pragma once

#include <cstdint>
#include <vector>

#include "sdiv/errors.hpp"

namespace sdiv {

// An observed discrete sample aggregated as (support point, count) pairs,
// kept sorted by x. Relative frequencies r(x) = count/n drive the empirical
// side of every divergence fit.
class FrequencyTable {
public:
    struct Entry {
        std::int64_t x;
        std::int64_t count;
    };

    FrequencyTable() = default;

    // Entries need not be sorted or unique; duplicates are summed,
    // zero-count rows dropped. Throws domain_error on negative counts or an
    // empty table.
    static FrequencyTable from_entries(std::vector<Entry> entries);

    // One observation per element.
    static FrequencyTable from_samples(const std::vector<std::int64_t>& xs);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::int64_t n() const noexcept { return n_; }
    std::int64_t min_x() const noexcept { return entries_.front().x; }
    std::int64_t max_x() const noexcept { return entries_.back().x; }

    // count(x)/n, 0 for unobserved x.
    double rel_freq(std::int64_t x) const noexcept;

    // Sum of x*count / n.
    double mean() const noexcept;

    // Smallest observed x with cumulative count >= n/2 (weighted median).
    std::int64_t median() const noexcept;

    // Copy without the largest observed support point (all its mass).
    // Throws domain_error if only one support point is present.
    FrequencyTable drop_top_point() const;

private:
    std::vector<Entry> entries_;
    std::int64_t n_ = 0;
};

} // namespace sdiv
