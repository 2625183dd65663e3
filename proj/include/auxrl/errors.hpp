#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace auxrl {

// Dimension disagreement between an operand and what a layer/network expects.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss, gradient or parameter.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A configuration with one or more invalid fields; what() lists all of them.
class ValidationError : public ConfigError {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : ConfigError(join(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& p) {
        std::string out = "invalid configuration:";
        for (const auto& s : p) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> problems_;
};

// Bad caller input that is not a shape problem (empty sets, mismatched grids, NaN actions).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Reward prediction on data whose reward carries no signal.
struct DegenerateRewardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Goal-conditioned operation requested from an environment without goals.
struct UnsupportedOperation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// normalize_best() with baseline best equal to the untrained score.
struct DegenerateBaselineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace auxrl
