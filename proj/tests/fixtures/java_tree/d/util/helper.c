#include <stdio.h>

struct point {
    int x;
    int y;
};

int add(int a, int b) {
    return a + b;
}

int main(int argc, char **argv) {
    struct point p = {1, 2};
    printf("%d\n", add(p.x, p.y));
    return 0;
}
