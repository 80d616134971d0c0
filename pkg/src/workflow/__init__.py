# Workflow package
