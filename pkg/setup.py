#
# Copyright (C) 2026 The NetMigrate developers
#
# NetMigrate is licensed under a BSD 3-Clause.
#
# You should have received a copy of the license along with this
# work. If not, see <https://opensource.org/licenses/BSD-3-Clause>.

# Import setuptools

from setuptools import setup, find_packages

# Define function to read from README.rst file


def readme():
    with open("README.rst") as file:
        return file.read()


# Set all package values

name: str = "netmigrate"
version: str = "1.0.0"
requirements: [] = ["numpy>=1.14.5", "scipy>=1.2.2"]
extras: {} = {"test": ["pytest>=6.0"]}
packages: [] = find_packages(exclude=["tests", "tests.*", "benchmarks", "benchmarks.*"])
package_data: {} = {"netmigrate": ["schema/*.json"]}
entry_points: {} = {"console_scripts": ["netmigrate=netmigrate.cli:main"]}
lic: str = "BSD 3-Clause"
author: str = "The NetMigrate developers"
description: str = "Policy checking and policy preserving server relocation for enterprise networks"
long_description: str = readme()
keywords: str = "network policy middlebox waypoint migration data center cloud extension"
include_package_data: bool = True
classifiers: [] = [
                    "Development Status :: 4 - Beta",
                    "License :: OSI Approved :: BSD License",
                    "Programming Language :: Python :: 3.7",
                    "Topic :: System :: Networking",
                  ]

# Run setup

setup(
    name=name,
    version=version,
    install_requires=requirements,
    extras_require=extras,
    packages=packages,
    package_data=package_data,
    entry_points=entry_points,
    license=lic,
    author=author,
    description=description,
    long_description=long_description,
    keywords=keywords,
    include_package_data=include_package_data,
    classifiers=classifiers,
    python_requires=">=3.7"
)
