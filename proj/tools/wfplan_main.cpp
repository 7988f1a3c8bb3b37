#include <cstdio>

int main() {
  std::puts("wfplan: command-line interface under construction");
  return 0;
}
