#include "photomosaic/convergence.hpp"

#include <cstdio>
#include <fstream>

#include "photomosaic/error.hpp"

namespace photomosaic {

void ConvergenceLog::record(std::uint64_t evaluations, double fitness, std::int64_t wall_ms)
{
    if (!samples_.empty() && samples_.back().evaluations == evaluations) {
        samples_.back() = {evaluations, fitness, wall_ms};
        return;
    }
    samples_.push_back({evaluations, fitness, wall_ms});
}

bool ConvergenceLog::is_monotone() const
{
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        if (samples_[i].evaluations <= samples_[i - 1].evaluations || samples_[i].fitness > samples_[i - 1].fitness) {
            return false;
        }
    }
    return true;
}

void ConvergenceLog::write_csv(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw MosaicError("cannot open convergence log for writing: " + path.string());
    }
    out << "evaluations,fitness,wall_ms\n";
    char buf[96];
    for (const auto& s : samples_) {
        std::snprintf(buf, sizeof buf, "%llu,%.17g,%lld\n", static_cast<unsigned long long>(s.evaluations), s.fitness,
                      static_cast<long long>(s.wall_ms));
        out << buf;
    }
    if (!out) {
        throw MosaicError("failed writing convergence log: " + path.string());
    }
}

} // namespace photomosaic
