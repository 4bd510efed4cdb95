// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
int main() { std::printf("placeholder\n"); return 0; }
