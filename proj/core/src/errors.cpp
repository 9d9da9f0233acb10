#include "mcopt/errors.hpp"

namespace mcopt {

bool is_user_error(const std::exception& e) noexcept {
  return dynamic_cast<const DomainError*>(&e) != nullptr ||
         dynamic_cast<const ParseError*>(&e) != nullptr ||
         dynamic_cast<const CompletenessError*>(&e) != nullptr ||
         dynamic_cast<const DuplicateError*>(&e) != nullptr ||
         dynamic_cast<const ValueError*>(&e) != nullptr ||
         dynamic_cast<const BudgetError*>(&e) != nullptr;
}

}  // namespace mcopt
