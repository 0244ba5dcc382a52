"""Print the weighted radial constants c_n next to n / 8."""

from velling_lab.diskquad import c_frak


def main(n_max: int = 20):
    print(f"{'n':>3}  {'c_n':>22}  {'n/8':>8}  {'abs err':>9}")
    for n in range(1, n_max + 1):
        c = c_frak(n)
        print(f"{n:>3}  {c:>22.17f}  {n / 8:>8.4f}  {abs(c - n / 8):>9.1e}")


if __name__ == "__main__":
    main()
