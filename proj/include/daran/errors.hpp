#pragma once

#include <stdexcept>
#include <string>

namespace daran {

// Constraint families used by validators and infeasibility errors.
enum class ConstraintClass {
    capacity,
    schedule,
    closure,
    speed,
    climb_rate,
    backhaul,
    separation,
    structure,
};

inline const char* to_string(ConstraintClass c) {
    switch (c) {
        case ConstraintClass::capacity: return "capacity";
        case ConstraintClass::schedule: return "schedule";
        case ConstraintClass::closure: return "closure";
        case ConstraintClass::speed: return "speed";
        case ConstraintClass::climb_rate: return "climb_rate";
        case ConstraintClass::backhaul: return "backhaul";
        case ConstraintClass::separation: return "separation";
        case ConstraintClass::structure: return "structure";
    }
    return "unknown";
}

class InfeasibleError : public std::runtime_error {
  public:
    InfeasibleError(ConstraintClass c, const std::string& msg)
        : std::runtime_error(std::string(to_string(c)) + ": " + msg), constraint_(c) {}

    ConstraintClass constraint() const { return constraint_; }

  private:
    ConstraintClass constraint_;
};

}  // namespace daran
