#include "zonec/report.hpp"
int main() { return 0; }
