#include <cstdio>

int main() {
  std::puts("symbdisc: CLI under construction");
  return 0;
}
