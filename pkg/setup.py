import setuptools

setuptools.setup(
    name='sorptrack',
    version='0.1.0',
    author='The sorptrack developers',
    description='Particle-tracking simulation of Langmuir and Freundlich adsorption',
    packages=setuptools.find_packages(exclude=['examples', 'examples.*']),
    classifiers=[
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Natural Language :: English',
        'License :: OSI Approved :: Apache Software License',
        'Development Status :: 3 - Alpha',
        'Operating System :: OS Independent',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Chemistry'
    ],
    python_requires='>=3.7',
    install_requires=["numpy >= 1.17",
                      "scipy >= 1.4",
                      "pandas >= 1.0",
                      "pyyaml >= 5.1",
                      "nose2"],
    entry_points={'console_scripts': ['sorptrack = sorptrack.experiments.cli:main']},
    test_suite='nose2.collector'
)
