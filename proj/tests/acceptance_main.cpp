#include <iostream>

#include "eigentube/acceptance.hpp"

int main() {
  auto outcome = eigentube::verify_all(std::cout);
  return outcome.all_passed() ? 0 : 1;
}
