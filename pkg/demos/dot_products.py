"""Few dot products versus many: the grid, lines through the origin, and the instrumented pipeline."""

from sumprod.dotprod import dot_product_set, dyadic_rich_lines, pipeline_run
from sumprod.lab import family, generate


def main() -> None:
    for kind, n, params in (("grid", 6, {}), ("lines", 6, {"k": 6}), ("lines", 3, {"k": 12})):
        P = generate(family(kind, n, **params))
        lam = dot_product_set(P)
        rich = dyadic_rich_lines(P)
        rep = pipeline_run(P)
        print(f"{kind}:{n} {params or ''}  |P|={len(P)}  |Lambda(P)|={len(lam)}  "
              f"|Lambda|/|P|^(2/3)={len(lam) / len(P) ** (2 / 3):.2f}")
        print(f"    rich class: {len(rich.slopes)} lines with M={rich.M}; pigeonhole bound {float(rich.bound):.2f}")
        if rep.applicable:
            print(f"    s={rep.s}, s'={rep.s_prime}, a={rep.a}; "
                  f"|Lambda_1|={rep.lambda1} |Lambda_2|={rep.lambda2} |Lambda_3|={rep.lambda3}; verified={rep.verified}")
        else:
            print(f"    pipeline inapplicable: {rep.reason}")


if __name__ == "__main__":
    main()
