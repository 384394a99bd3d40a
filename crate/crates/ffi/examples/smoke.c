#include <stdio.h>
#include "ugk.h"

int main(void) {
    const char *text =
        "universe ap(1,1)\n"
        "edge e1 : src 1 -> { all \\ {0,2} }\n"
        "edge e2 : src 2 -> { all \\ {0,1} }\n"
        "family en(n) for n in ap(3,1) : src n -> { n-2, n }\n";
    UgkGraph *g = NULL;
    if (ugk_graph_parse(text, &g) != UGK_STATUS_OK) {
        fprintf(stderr, "%s\n", ugk_last_error());
        return 1;
    }
    UgkVerdict v;
    ugk_check(g, "K", 8, &v, NULL);
    UgkElement *l = NULL;
    size_t order = 0;
    ugk_element_parse(g, "f3(D(; mie#0))", 16, &l);
    ugk_element_order(g, l, 10, &order);
    printf("K %s, order %zu\n", v == UGK_VERDICT_HOLDS ? "holds" : "does not hold", order);
    ugk_element_free(l);
    ugk_graph_free(g);
    return 0;
}
