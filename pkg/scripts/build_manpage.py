#!/usr/bin/env python3
"""Build script to generate man page for listdec using argparse-manpage."""

import sys
from pathlib import Path


def build_manpage():
    """Generate the listdec man page."""
    src_dir = Path(__file__).parent.parent / "src"
    sys.path.insert(0, str(src_dir))

    from argparse_manpage.manpage import Manpage

    from listdec.__about__ import __current_year__, __version__
    from listdec._app import _columns_epilog, build_parser

    manpage = Manpage(build_parser())

    manpage.prog = "listdec"
    manpage.description = (
        "listdec checks list-decoding claims about random linear codes at desk scale."
    )
    manpage.long_description = (  # type: ignore[attr-defined]
        "listdec computes Johnson-type list-decoding radii, brute-force list sizes, "
        "RIP constants of subsampled DFT-type matrices and exact Rademacher chaos "
        "moments, and runs seeded experiments that chain them together.\n\n"
        "  bounds    - Closed-form list-decoding radii\n"
        "  oracle    - Brute-force list size of a code at a radius\n"
        "  rip       - RIP constants (exact, sampled) and the row-count scan\n"
        "  chain     - Reduction chain from RIP to list decodability\n"
        "  scan      - Run any experiment from a JSON config\n"
        "  moment    - Exact chaos moments and the randomized audit\n"
        "  covering  - Maurey approximation error curve"
    )
    manpage.project = "listdec"  # type: ignore[attr-defined]
    manpage.version = __version__  # type: ignore[attr-defined]
    manpage.manual_section = 1  # type: ignore[attr-defined]
    manpage.manual_title = "User Commands"  # type: ignore[attr-defined]
    manpage.author = "Kumar Anirudha <sot@anirudha.dev>"  # type: ignore[attr-defined]
    manpage.date = f"2024-{__current_year__}"

    man_content = str(manpage)

    columns = "\n".join(
        f".TP\n.B {line.split(':')[0].strip()}\n{line.split(':', 1)[1].strip()}"
        for line in _columns_epilog().splitlines()[1:]
    )

    additional_sections = f"""
.SH EXAMPLES
.TP
.B listdec bounds --q 2 --johnson 0.375
Print the Johnson radius J_2(3/8)
.TP
.B listdec oracle --generator code.txt --radius 3/8 --ell 2
Decide list decodability of a code by exhaustive search
.TP
.B listdec rip exact --q 2 --ktilde 3 --k 4
Exact RIP constant of the full binary Lin matrix
.TP
.B listdec chain --seed 2024 --trials 100 -o chain.csv
Run the reduction chain and write its records
.TP
.B listdec moment --m 2 --s 2 --all-ones
Exact second chaos moment of the all-ones grid

.SH CSV COLUMNS
{columns}

.SH ENVIRONMENT
.TP
.B LISTDEC_THREADS
Number of trial workers (0 or unset: number of physical cores)

.SH EXIT STATUS
.TP
.B 0
Success
.TP
.B 1
Invalid input or usage
.TP
.B 2
An enumeration budget would be exceeded

.SH COPYRIGHT
MIT License © 2024-{__current_year__} Kumar Anirudha
"""

    return man_content.rstrip() + additional_sections


if __name__ == "__main__":
    try:
        content = build_manpage()
        output_dir = Path(__file__).parent.parent / "man"
        output_dir.mkdir(exist_ok=True)

        output_file = output_dir / "listdec.1"
        with open(output_file, "w") as f:
            f.write(content)

        print(f"✓ Man page generated: {output_file}")
        sys.exit(0)
    except Exception as e:
        print(f"✗ Error generating man page: {e}", file=sys.stderr)
        import traceback

        traceback.print_exc()
        sys.exit(1)
