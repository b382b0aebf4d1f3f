#!/usr/bin/env python
import argparse

from lconsistency.experiments.yaml.factory import factory_scenario_from_yaml


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('path', help='YAML or JSON scenario file')
    args = parser.parse_args()

    scenario_file = factory_scenario_from_yaml(args.path)
    print(scenario_file.scenario)
    print(scenario_file.outputs)


if __name__ == '__main__':
    main()
