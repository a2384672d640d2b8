"""Print the numerical non-existence evidence as JSON."""

import json

from cyclic_designs import nogo


def main():
    merit = nogo.hadamard_merit_minimize()
    cost, phi = nogo.simplex3_cost_minimum()
    report = {
        "hadamard_merit": merit.to_json(),
        "simplex3": {"min_cost": cost, "argmin_phi": phi,
                     "closed_form_at_argmin": nogo.simplex3_cost_closed_form(phi)},
        "moment_ranks": {d: nogo.moment_matrix_rank(d) for d in range(2, 9)},
        "qubit_moments": nogo.qubit_moment_system(4).to_json(),
    }
    print(json.dumps(report, indent=1))


if __name__ == "__main__":
    main()
