#include "qfa/screen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qfa/errors.hpp"

namespace qfa {

std::size_t ScreenDataset::gene_index(const std::string& gene) const
{
    auto it = std::find(genes.begin(), genes.end(), gene);
    if (it == genes.end()) throw KeyingError("unknown gene " + gene);
    return static_cast<std::size_t>(it - genes.begin());
}

bool ScreenDataset::has_gene(const std::string& gene) const
{
    return std::find(genes.begin(), genes.end(), gene) != genes.end();
}

std::size_t ScreenDataset::n_repeats(int condition, const std::string& gene) const
{
    return static_cast<std::size_t>(std::count_if(repeats.begin(), repeats.end(), [&](const auto& r) {
        return r.condition == condition && r.gene == gene;
    }));
}

ScreenDataset ScreenDataset::condition_slice(int condition) const
{
    ScreenDataset out;
    out.condition_labels = {condition_labels.at(condition)};
    std::set<std::string> seen;
    for (const auto& r : repeats) {
        if (r.condition != condition) continue;
        RepeatSeries c = r;
        c.condition = 0;
        out.repeats.push_back(std::move(c));
        seen.insert(r.gene);
    }
    for (const auto& g : genes)
        if (seen.count(g)) out.genes.push_back(g);
    return out;
}

ScreenDataset ScreenDataset::without(const std::vector<std::string>& exclude) const
{
    const std::set<std::string> ex(exclude.begin(), exclude.end());
    ScreenDataset out;
    out.condition_labels = condition_labels;
    for (const auto& g : genes)
        if (!ex.count(g)) out.genes.push_back(g);
    for (const auto& r : repeats)
        if (!ex.count(r.gene)) out.repeats.push_back(r);
    return out;
}

void ScreenDataset::validate() const
{
    const std::set<std::string> gs(genes.begin(), genes.end());
    if (gs.size() != genes.size()) throw DataError("screen: duplicate gene names");
    for (const auto& r : repeats) {
        if (!gs.count(r.gene)) throw KeyingError("screen: repeat for unlisted gene " + r.gene);
        if (r.condition < 0 || r.condition >= static_cast<int>(condition_labels.size()))
            throw DataError("screen: bad condition index for gene " + r.gene);
        if (r.times.size() != r.values.size())
            throw DataError("screen: times/values length mismatch for " + r.gene + " " + r.id);
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            if (!std::isfinite(r.values[i]) || !std::isfinite(r.times[i]))
                throw DataError("screen: non-finite value in " + r.gene + " " + r.id);
            if (i > 0 && !(r.times[i] > r.times[i - 1]))
                throw DataError("screen: non-monotone time in " + r.gene + " repeat " + r.id +
                                " at row " + std::to_string(i));
        }
    }
}

ScreenDataset empty_screen(const std::vector<std::string>& genes)
{
    ScreenDataset s;
    s.genes = genes;
    return s;
}

}  // namespace qfa
