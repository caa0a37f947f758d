#include "sdiv/frequency_table.hpp"

#include <algorithm>
#include <map>

namespace sdiv {

FrequencyTable FrequencyTable::from_entries(std::vector<Entry> entries) {
    std::map<std::int64_t, std::int64_t> merged;
    for (const Entry& e : entries) {
        if (e.count < 0)
            throw domain_error("negative count for support point " +
                               std::to_string(e.x));
        if (e.count > 0) merged[e.x] += e.count;
    }
    if (merged.empty())
        throw domain_error("frequency table has no observations");

    FrequencyTable t;
    t.entries_.reserve(merged.size());
    for (const auto& [x, count] : merged) {
        t.entries_.push_back(Entry{x, count});
        t.n_ += count;
    }
    return t;
}

FrequencyTable FrequencyTable::from_samples(const std::vector<std::int64_t>& xs) {
    std::vector<Entry> entries;
    entries.reserve(xs.size());
    for (std::int64_t x : xs) entries.push_back(Entry{x, 1});
    return from_entries(std::move(entries));
}

double FrequencyTable::rel_freq(std::int64_t x) const noexcept {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), x,
        [](const Entry& e, std::int64_t v) { return e.x < v; });
    if (it == entries_.end() || it->x != x) return 0.0;
    return static_cast<double>(it->count) / static_cast<double>(n_);
}

double FrequencyTable::mean() const noexcept {
    double s = 0.0;
    for (const Entry& e : entries_)
        s += static_cast<double>(e.x) * static_cast<double>(e.count);
    return s / static_cast<double>(n_);
}

std::int64_t FrequencyTable::median() const noexcept {
    // Smallest x whose cumulative count reaches half the sample (ties to the
    // lower point, matching the inverse-cdf convention at p = 1/2).
    const std::int64_t half = (n_ + 1) / 2;
    std::int64_t cum = 0;
    for (const Entry& e : entries_) {
        cum += e.count;
        if (cum >= half) return e.x;
    }
    return entries_.back().x;
}

FrequencyTable FrequencyTable::drop_top_point() const {
    if (entries_.size() <= 1)
        throw domain_error("cannot drop the only support point");
    std::vector<Entry> kept(entries_.begin(), entries_.end() - 1);
    return from_entries(std::move(kept));
}

} // namespace sdiv
