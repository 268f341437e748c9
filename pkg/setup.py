from setuptools import setup, find_packages

# Long description will go up on the pypi page
with open('README.rst') as file:
    LONG_DESCRIPTION = file.read()

# Dependencies.
with open('requirements.txt') as f:
    requirements = f.readlines()
INSTALL_REQUIRES = [t.strip() for t in requirements if t.strip()]

# Single source of the version string
VERSION = {}
with open('qsmooth/_version.py') as f:
    exec(f.read(), VERSION)

opts = dict(name='qsmooth',
            description='Randomized smoothing and certified robustness of quantum classifiers',
            long_description=LONG_DESCRIPTION,
            download_url='',
            license='Apache License, Version 2.0',
            classifiers=['Development Status :: 3 - Alpha',
                         'Environment :: Console',
                         'Intended Audience :: Science/Research',
                         'License :: OSI Approved :: Apache Software License',
                         'Operating System :: OS Independent',
                         'Programming Language :: Python',
                         'Topic :: Scientific/Engineering :: Physics'],
            platforms='OS Independent',
            version=VERSION['__version__'],
            packages=find_packages(exclude=['examples', 'examples.*']),
            python_requires='>=3.8',
            install_requires=INSTALL_REQUIRES,
            tests_require='tox',
            entry_points={'console_scripts': ['qsmooth = qsmooth.cli.main:main']})


if __name__ == '__main__':
    setup(**opts)
