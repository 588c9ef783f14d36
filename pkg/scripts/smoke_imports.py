from grade_ao.ao import ao_cycles
from grade_ao.grade import grade_cycles
from grade_ao.lifting import cpo_lift
from grade_ao.schema import CodeParams
from grade_ao.topology import count_cycles_tanner


def main() -> None:
    """Run lightweight sanity checks for imports and core pipeline wiring."""
    params = CodeParams.full_memory(3, 7, 2, circulant=7, replicas=4)
    grade = grade_cycles(params)
    partition = ao_cycles(params, grade.distribution, seed=0)
    lift = cpo_lift(partition.matrix, params, seed=0)
    print(
        {
            "distribution": [round(v, 4) for v in grade.distribution.probs],
            "ao_objective": partition.objective,
            "lifted_cycles4": lift.cycles4,
            "lifted_cycles6": count_cycles_tanner(partition.matrix, lift.matrix, params, 6),
        }
    )


if __name__ == "__main__":
    main()
