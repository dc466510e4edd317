#!/usr/bin/env python3

from setuptools import setup, find_packages

setup(name='hypnav',
      version='0.0.1',
      packages=find_packages(exclude=['tests']),
      install_requires=['numpy', 'scipy'],
      include_package_data=True,
      scripts=['HyperNav.py']
      )
