#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace photomosaic {

struct ConvergenceSample {
    std::uint64_t evaluations = 0;
    double fitness = 0.0;
    std::int64_t wall_ms = 0;

    friend bool operator==(const ConvergenceSample&, const ConvergenceSample&) = default;
};

/// (evaluations, overall fitness) trace of one solver run. Samples are
/// taken every `stride` evaluations and on every accepted mutation;
/// evaluation counts are strictly increasing.
class ConvergenceLog {
public:
    explicit ConvergenceLog(std::uint64_t stride = 1000) : stride_(stride == 0 ? 1 : stride) {}

    [[nodiscard]] std::uint64_t stride() const { return stride_; }
    [[nodiscard]] const std::vector<ConvergenceSample>& samples() const { return samples_; }
    [[nodiscard]] bool empty() const { return samples_.empty(); }
    [[nodiscard]] const ConvergenceSample& back() const { return samples_.back(); }

    /// Appends unless a sample at this evaluation count already exists, in
    /// which case that sample is overwritten with the newer fitness.
    void record(std::uint64_t evaluations, double fitness, std::int64_t wall_ms);

    /// True when `evaluations` lands on a stride boundary.
    [[nodiscard]] bool due(std::uint64_t evaluations) const { return evaluations % stride_ == 0; }

    [[nodiscard]] bool is_monotone() const;

    /// CSV with header "evaluations,fitness,wall_ms".
    void write_csv(const std::filesystem::path& path) const;

private:
    std::uint64_t stride_;
    std::vector<ConvergenceSample> samples_;
};

} // namespace photomosaic
