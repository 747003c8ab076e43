#include <cstdio>
int main() { std::puts("dimcat (wip)"); return 0; }
