import argparse

from src.workflow.sweep_workflow import export_workflow_graph


def main():
    parser = argparse.ArgumentParser(
        description="Export the threshold-sweep workflow graph (Mermaid text, or PNG for .png paths)."
    )
    parser.add_argument(
        "-o", "--output", default="data/sweep_workflow.mmd",
        help="Output path (default: data/sweep_workflow.mmd)"
    )
    args = parser.parse_args()
    path = export_workflow_graph(args.output)
    print(f"Workflow graph exported to {path}")


if __name__ == "__main__":
    main()
