#pragma once

#include <stdexcept>
#include <string>

namespace sdae {

// Base error for everything thrown by this library. Integration loops
// attach the failing step index before rethrowing.
class SdaeError : public std::runtime_error {
public:
    explicit SdaeError(const std::string& msg)
        : std::runtime_error(msg), base_(msg) {}

    void attach_step(long step) {
        step_ = step;
        annotated_ = "step " + std::to_string(step) + ": " + base_;
    }

    long step() const noexcept { return step_; }            // -1 if not inside a run
    const char* what() const noexcept override {
        return annotated_.empty() ? base_.c_str() : annotated_.c_str();
    }

private:
    std::string base_;
    std::string annotated_;
    long step_ = -1;
};

#define SDAE_DEFINE_ERROR(Name)                              \
    class Name : public SdaeError {                          \
    public:                                                  \
        explicit Name(const std::string& msg)                \
            : SdaeError(std::string(#Name) + ": " + msg) {}  \
    }

SDAE_DEFINE_ERROR(NonFiniteMatrix);
SDAE_DEFINE_ERROR(NonFiniteCoefficient);
SDAE_DEFINE_ERROR(RankChange);
SDAE_DEFINE_ERROR(InvalidResolution);
SDAE_DEFINE_ERROR(GridMismatch);
SDAE_DEFINE_ERROR(SingularIterationMatrix);
SDAE_DEFINE_ERROR(SingularConstraintMatrix);
SDAE_DEFINE_ERROR(Overflow);
SDAE_DEFINE_ERROR(InvalidSpec);

#undef SDAE_DEFINE_ERROR

} // namespace sdae
