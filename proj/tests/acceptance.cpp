#include "zonec/report.hpp"
#include "zonec/generators.hpp"
int main() { return 0; }
